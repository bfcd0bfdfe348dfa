#include "cqa/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <unordered_set>

#include "cqa/error.hpp"
#include "cqa/html.hpp"
#include "xml_rows.hpp"

namespace cqa {

namespace {

template <typename T>
std::optional<T> to_number(std::optional<std::string_view> text) {
  if (!text) return std::nullopt;
  T value{};
  const auto* first = text->data();
  const auto* last = first + text->size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

int parse_digits(std::string_view s, std::size_t pos, std::size_t len) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') throw DataError("bad timestamp: " + std::string(s));
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

bool comes_before(const Comment& a, const Comment& b) {
  return std::tie(a.creation_time, a.comment_id) < std::tie(b.creation_time, b.comment_id);
}

}  // namespace

Timestamp parse_timestamp(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.fff]
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    throw DataError("bad timestamp: " + std::string(s));
  }
  using namespace std::chrono;
  const year_month_day date{year{parse_digits(s, 0, 4)}, month{static_cast<unsigned>(parse_digits(s, 5, 2))},
                            day{static_cast<unsigned>(parse_digits(s, 8, 2))}};
  if (!date.ok()) throw DataError("bad timestamp: " + std::string(s));
  const int hh = parse_digits(s, 11, 2);
  const int mm = parse_digits(s, 14, 2);
  const int ss = parse_digits(s, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) throw DataError("bad timestamp: " + std::string(s));
  std::int64_t millis = 0;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int scale = 100;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      millis += (s[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) throw DataError("bad timestamp: " + std::string(s));
  const auto day_ms = duration_cast<milliseconds>(sys_days{date}.time_since_epoch()).count();
  return day_ms + ((hh * 60 + mm) * 60 + ss) * std::int64_t{1000} + millis;
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const sys_days days{floor<std::chrono::days>(milliseconds{ts})};
  const year_month_day date{days};
  std::int64_t rest = ts - duration_cast<milliseconds>(days.time_since_epoch()).count();
  const auto ms = rest % 1000;
  rest /= 1000;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lld", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<long long>(rest / 3600), static_cast<long long>(rest / 60 % 60),
                static_cast<long long>(rest % 60), static_cast<long long>(ms));
  return buf;
}

const std::vector<Comment>& Thread::comments_for(Id answer_id) const {
  static const std::vector<Comment> kNone;
  const auto it = comments_by_answer.find(answer_id);
  return it == comments_by_answer.end() ? kNone : it->second;
}

double Dataset::positive_ratio() const {
  if (instances.empty()) return 0.0;
  std::size_t pos = 0;
  for (const auto& inst : instances) pos += static_cast<std::size_t>(inst.label);
  return static_cast<double>(pos) / static_cast<double>(instances.size());
}

std::vector<Post> parse_posts(std::istream& in, ParseStats* stats) {
  ParseStats local;
  ParseStats& st = stats ? *stats : local;
  std::vector<Post> posts;
  detail::for_each_row(in, "Posts.xml", [&](const detail::Row& row) {
    ++st.rows;
    const auto type = to_number<int>(row.get("PostTypeId"));
    if (type && *type != 1 && *type != 2) {
      ++st.skipped_other_type;
      return;
    }
    const auto id = to_number<Id>(row.get("Id"));
    const auto created = row.get("CreationDate");
    const auto body = row.get("Body");
    const auto score = to_number<std::int64_t>(row.get("Score"));
    if (!type || !id || !created || !body || !score) {
      ++st.skipped_missing_attribute;
      return;
    }
    Post post;
    post.post_id = *id;
    post.kind = *type == 1 ? PostKind::question : PostKind::answer;
    post.creation_time = parse_timestamp(*created);
    post.score = *score;
    post.owner = to_number<Id>(row.get("OwnerUserId"));
    if (post.kind == PostKind::question) {
      post.accepted_answer_id = to_number<Id>(row.get("AcceptedAnswerId"));
    } else {
      post.parent_id = to_number<Id>(row.get("ParentId"));
      if (!post.parent_id) {
        ++st.skipped_missing_attribute;
        return;
      }
    }
    // The XML layer already undid one level of escaping; what remains is HTML.
    post.body_html = std::string(*body);
    post.body_text = strip_html(post.body_html);
    posts.push_back(std::move(post));
  });
  return posts;
}

std::vector<User> parse_users(std::istream& in, ParseStats* stats) {
  ParseStats local;
  ParseStats& st = stats ? *stats : local;
  std::vector<User> users;
  detail::for_each_row(in, "Users.xml", [&](const detail::Row& row) {
    ++st.rows;
    const auto id = to_number<Id>(row.get("Id"));
    const auto rep = to_number<std::int64_t>(row.get("Reputation"));
    if (!id || !rep) {
      ++st.skipped_missing_attribute;
      return;
    }
    User u;
    u.user_id = *id;
    u.reputation = std::max<std::int64_t>(0, *rep);
    u.view_count = std::max<std::int64_t>(0, to_number<std::int64_t>(row.get("Views")).value_or(0));
    u.up_vote_count = std::max<std::int64_t>(0, to_number<std::int64_t>(row.get("UpVotes")).value_or(0));
    u.down_vote_count = std::max<std::int64_t>(0, to_number<std::int64_t>(row.get("DownVotes")).value_or(0));
    users.push_back(u);
  });
  return users;
}

std::vector<Comment> parse_comments(std::istream& in, ParseStats* stats) {
  ParseStats local;
  ParseStats& st = stats ? *stats : local;
  std::vector<Comment> comments;
  detail::for_each_row(in, "Comments.xml", [&](const detail::Row& row) {
    ++st.rows;
    const auto id = to_number<Id>(row.get("Id"));
    const auto post = to_number<Id>(row.get("PostId"));
    const auto created = row.get("CreationDate");
    if (!id || !post || !created) {
      ++st.skipped_missing_attribute;
      return;
    }
    Comment c;
    c.comment_id = *id;
    c.post_id = *post;
    c.author = to_number<Id>(row.get("UserId"));
    c.creation_time = parse_timestamp(*created);
    c.text = normalize_whitespace(row.get("Text").value_or(""));
    comments.push_back(std::move(c));
  });
  return comments;
}

std::unordered_map<Id, BadgeCounts> parse_badges(std::istream& in, ParseStats* stats) {
  ParseStats local;
  ParseStats& st = stats ? *stats : local;
  std::unordered_map<Id, BadgeCounts> badges;
  detail::for_each_row(in, "Badges.xml", [&](const detail::Row& row) {
    ++st.rows;
    const auto user = to_number<Id>(row.get("UserId"));
    const auto cls = to_number<int>(row.get("Class"));
    if (!user || !cls) {
      ++st.skipped_missing_attribute;
      return;
    }
    auto& counts = badges[*user];
    switch (*cls) {
      case 1: ++counts.gold; break;
      case 2: ++counts.silver; break;
      case 3: ++counts.bronze; break;
      default:
        ++st.unknown_badge_class;
        ++counts.bronze;
    }
  });
  return badges;
}

void attach_badges(std::vector<User>& users, const std::unordered_map<Id, BadgeCounts>& badges) {
  for (auto& u : users) {
    const auto it = badges.find(u.user_id);
    if (it == badges.end()) continue;
    u.gold = it->second.gold;
    u.silver = it->second.silver;
    u.bronze = it->second.bronze;
  }
}

Dataset build_dataset(std::vector<Post> posts, std::vector<Comment> comments, std::vector<User> users) {
  Dataset ds;
  std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) { return a.post_id < b.post_id; });

  std::unordered_map<Id, std::size_t> question_slot;
  std::vector<Thread> candidates;
  for (auto& p : posts) {
    if (p.kind != PostKind::question) continue;
    ++ds.stats.questions_seen;
    question_slot.emplace(p.post_id, candidates.size());
    candidates.emplace_back().question = std::move(p);
  }
  std::unordered_map<Id, std::size_t> answer_slot;  // answer id -> candidate index
  for (auto& p : posts) {
    if (p.kind != PostKind::answer) continue;
    ++ds.stats.answers_seen;
    const auto it = question_slot.find(*p.parent_id);
    if (it == question_slot.end()) {
      ++ds.stats.orphan_answers;
      continue;
    }
    answer_slot.emplace(p.post_id, it->second);
    candidates[it->second].answers.push_back(std::move(p));
  }

  std::sort(comments.begin(), comments.end(), comes_before);
  for (auto& c : comments) {
    if (const auto q = question_slot.find(c.post_id); q != question_slot.end()) {
      candidates[q->second].comments_on_question.push_back(std::move(c));
    } else if (const auto a = answer_slot.find(c.post_id); a != answer_slot.end()) {
      candidates[a->second].comments_by_answer[c.post_id].push_back(std::move(c));
    } else {
      ++ds.stats.orphan_comments;
    }
  }

  for (auto& t : candidates) {
    if (t.answers.empty()) {
      ++ds.stats.threads_without_answers;
      continue;
    }
    if (!t.question.accepted_answer_id) {
      ++ds.stats.threads_without_accepted;
      continue;
    }
    const Id accepted = *t.question.accepted_answer_id;
    if (std::none_of(t.answers.begin(), t.answers.end(), [&](const Post& a) { return a.post_id == accepted; })) {
      ++ds.stats.accepted_answer_missing;
      continue;
    }
    std::sort(t.answers.begin(), t.answers.end(), [](const Post& a, const Post& b) {
      return std::tie(a.creation_time, a.post_id) < std::tie(b.creation_time, b.post_id);
    });
    const std::size_t ti = ds.threads.size();
    for (std::size_t ai = 0; ai < t.answers.size(); ++ai) {
      const Id aid = t.answers[ai].post_id;
      ds.instances.push_back({ti, ai, t.question.post_id, aid, aid == accepted ? 1 : 0});
    }
    ds.threads.push_back(std::move(t));
  }

  for (auto& u : users) ds.users.emplace(u.user_id, u);
  return ds;
}

void derive_user_stats(const std::vector<Thread>& threads, UserIndex& users) {
  std::unordered_map<Id, std::int64_t> accepted;
  for (auto& [id, u] : users) {
    u.q_count = 0;
    u.a_count = 0;
    u.accept_rate.reset();
  }
  for (const auto& t : threads) {
    if (t.question.owner) {
      if (auto it = users.find(*t.question.owner); it != users.end()) ++it->second.q_count;
    }
    for (const auto& a : t.answers) {
      if (!a.owner) continue;
      auto it = users.find(*a.owner);
      if (it == users.end()) continue;
      ++it->second.a_count;
      if (t.question.accepted_answer_id == a.post_id) ++accepted[*a.owner];
    }
  }
  for (auto& [id, u] : users) {
    if (u.a_count > 0) u.accept_rate = static_cast<double>(accepted[id]) / static_cast<double>(u.a_count);
  }
}

}  // namespace cqa
