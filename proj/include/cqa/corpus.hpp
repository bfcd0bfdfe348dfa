#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cqa {

using Id = std::int64_t;

// Milliseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// Parses "YYYY-MM-DDTHH:MM:SS[.fff]" (zone-less means UTC). Throws DataError.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct User {
  Id user_id = 0;
  std::int64_t reputation = 0;
  std::int64_t gold = 0;
  std::int64_t silver = 0;
  std::int64_t bronze = 0;
  std::int64_t q_count = 0;
  std::int64_t a_count = 0;
  std::int64_t up_vote_count = 0;
  std::int64_t down_vote_count = 0;
  std::int64_t view_count = 0;
  std::optional<double> accept_rate;

  bool operator==(const User&) const = default;
};

enum class PostKind { question, answer };

struct Post {
  Id post_id = 0;
  PostKind kind = PostKind::question;
  std::string body_html;
  std::string body_text;
  Timestamp creation_time = 0;
  std::int64_t score = 0;
  std::optional<Id> owner;  // empty for anonymous/deleted accounts
  std::optional<Id> accepted_answer_id;
  std::optional<Id> parent_id;

  bool operator==(const Post&) const = default;
};

struct Comment {
  Id comment_id = 0;
  Id post_id = 0;
  std::optional<Id> author;
  Timestamp creation_time = 0;
  std::string text;

  bool operator==(const Comment&) const = default;
};

struct Thread {
  Post question;
  std::vector<Post> answers;  // creation_time ascending, post_id breaks ties
  std::map<Id, std::vector<Comment>> comments_by_answer;
  std::vector<Comment> comments_on_question;

  const std::vector<Comment>& comments_for(Id answer_id) const;
};

struct Instance {
  std::size_t thread_index = 0;
  std::size_t answer_index = 0;
  Id question_id = 0;
  Id answer_id = 0;
  int label = 0;

  bool operator==(const Instance&) const = default;
};

struct BadgeCounts {
  std::int64_t gold = 0;
  std::int64_t silver = 0;
  std::int64_t bronze = 0;
};

// Per-parse diagnostics. Rows are skipped rather than aborting the parse.
struct ParseStats {
  std::size_t rows = 0;
  std::size_t skipped_other_type = 0;
  std::size_t skipped_missing_attribute = 0;
  std::size_t unknown_badge_class = 0;
};

struct BuildStats {
  std::size_t questions_seen = 0;
  std::size_t answers_seen = 0;
  std::size_t orphan_answers = 0;
  std::size_t orphan_comments = 0;
  std::size_t threads_without_answers = 0;
  std::size_t threads_without_accepted = 0;
  std::size_t accepted_answer_missing = 0;
};

using UserIndex = std::unordered_map<Id, User>;

struct Dataset {
  std::vector<Thread> threads;
  std::vector<Instance> instances;
  UserIndex users;
  BuildStats stats;

  std::size_t answer_count() const { return instances.size(); }
  double positive_ratio() const;
};

// Stack Exchange dump readers. Malformed XML throws DataError carrying the
// line number; rows missing a required attribute are counted and skipped.
std::vector<Post> parse_posts(std::istream& in, ParseStats* stats = nullptr);
std::vector<User> parse_users(std::istream& in, ParseStats* stats = nullptr);
std::vector<Comment> parse_comments(std::istream& in, ParseStats* stats = nullptr);
std::unordered_map<Id, BadgeCounts> parse_badges(std::istream& in, ParseStats* stats = nullptr);

void attach_badges(std::vector<User>& users, const std::unordered_map<Id, BadgeCounts>& badges);

// Groups posts into threads and labels every answer. Threads with no answers
// or no (resolvable) accepted answer are dropped. Comments whose target post
// is unknown are dropped.
Dataset build_dataset(std::vector<Post> posts, std::vector<Comment> comments, std::vector<User> users);

// Fills q_count, a_count and accept_rate from the assembled threads.
void derive_user_stats(const std::vector<Thread>& threads, UserIndex& users);

}  // namespace cqa
