#pragma once

#include <array>
#include <map>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "cqa/corpus.hpp"

namespace cqa {

// Directed message counts between users. Every answer is a message from the
// answerer to the questioner; every comment is a message from the commenter
// to the owner of the commented post. Self messages and anonymous endpoints
// are not recorded.
class UserRelationGraph {
 public:
  void add_message(const std::optional<Id>& sender, const std::optional<Id>& receiver);

  std::int64_t count(Id sender, Id receiver) const;
  std::int64_t sent(Id user) const;
  std::int64_t received(Id user) const;
  std::int64_t total() const { return total_; }

  const std::map<std::pair<Id, Id>, std::int64_t>& edges() const { return edges_; }

  // "sender receiver count" per line, sorted by (sender, receiver).
  void write_edge_list(std::ostream& out) const;

 private:
  std::map<std::pair<Id, Id>, std::int64_t> edges_;
  std::unordered_map<Id, std::int64_t> out_degree_;
  std::unordered_map<Id, std::int64_t> in_degree_;
  std::int64_t total_ = 0;
};

UserRelationGraph build_graph(const std::vector<Thread>& threads);

// Edge names follow the arrows of the relationship diagram literally:
// aq_send_edge counts questioner -> answerer messages and qa_send_edge counts
// answerer -> questioner messages.
struct RelationFeatures {
  static constexpr std::array<std::string_view, 6> kNames{"aq_send_edge",    "qa_send_edge",    "q_user_send_edge",
                                                          "q_user_get_edge", "a_user_send_edge", "a_user_get_edge"};
  std::array<double, 6> values{};
  bool missing = false;  // questioner or answerer anonymous

  std::array<double, 6> with_nan() const;
};

RelationFeatures extract_relation(const Thread& thread, const Post& answer, const UserRelationGraph& graph);

}  // namespace cqa
