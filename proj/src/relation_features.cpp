#include "cqa/relation_features.hpp"

#include <limits>

namespace cqa {

void UserRelationGraph::add_message(const std::optional<Id>& sender, const std::optional<Id>& receiver) {
  if (!sender || !receiver || *sender == *receiver) return;
  ++edges_[{*sender, *receiver}];
  ++out_degree_[*sender];
  ++in_degree_[*receiver];
  ++total_;
}

std::int64_t UserRelationGraph::count(Id sender, Id receiver) const {
  const auto it = edges_.find({sender, receiver});
  return it == edges_.end() ? 0 : it->second;
}

std::int64_t UserRelationGraph::sent(Id user) const {
  const auto it = out_degree_.find(user);
  return it == out_degree_.end() ? 0 : it->second;
}

std::int64_t UserRelationGraph::received(Id user) const {
  const auto it = in_degree_.find(user);
  return it == in_degree_.end() ? 0 : it->second;
}

void UserRelationGraph::write_edge_list(std::ostream& out) const {
  for (const auto& [edge, n] : edges_) out << edge.first << ' ' << edge.second << ' ' << n << '\n';
}

UserRelationGraph build_graph(const std::vector<Thread>& threads) {
  UserRelationGraph g;
  for (const auto& t : threads) {
    const auto& asker = t.question.owner;
    for (const auto& c : t.comments_on_question) g.add_message(c.author, asker);
    for (const auto& a : t.answers) {
      g.add_message(a.owner, asker);
      for (const auto& c : t.comments_for(a.post_id)) g.add_message(c.author, a.owner);
    }
  }
  return g;
}

std::array<double, 6> RelationFeatures::with_nan() const {
  if (!missing) return values;
  std::array<double, 6> out;
  out.fill(std::numeric_limits<double>::quiet_NaN());
  return out;
}

RelationFeatures extract_relation(const Thread& thread, const Post& answer, const UserRelationGraph& graph) {
  RelationFeatures f;
  if (!thread.question.owner || !answer.owner) {
    f.missing = true;
    return f;
  }
  const Id q = *thread.question.owner;
  const Id a = *answer.owner;
  f.values = {static_cast<double>(graph.count(q, a)), static_cast<double>(graph.count(a, q)),
              static_cast<double>(graph.sent(q)),     static_cast<double>(graph.received(q)),
              static_cast<double>(graph.sent(a)),     static_cast<double>(graph.received(a))};
  return f;
}

}  // namespace cqa
