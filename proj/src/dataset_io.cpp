#include "cqa/dataset_io.hpp"

#include <algorithm>

#include "cqa/error.hpp"
#include "cqa/html.hpp"

namespace cqa {

namespace {

using nlohmann::json;

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json post_record(const Post& p) {
  return json{{"id", p.post_id},
              {"kind", p.kind == PostKind::question ? "question" : "answer"},
              {"created_ms", p.creation_time},
              {"score", p.score},
              {"owner", opt(p.owner)},
              {"accepted", opt(p.accepted_answer_id)},
              {"parent", opt(p.parent_id)},
              {"body", p.body_html}};
}

json comment_record(const Comment& c) {
  return json{{"id", c.comment_id},
              {"post", c.post_id},
              {"author", opt(c.author)},
              {"created_ms", c.creation_time},
              {"text", c.text}};
}

template <typename Fn>
void read_records(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (next_data_line(in, line)) {
    ++lineno;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": record " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const Manifest& manifest) {
  auto posts = open_output(dir / "posts.jsonl");
  auto comments = open_output(dir / "comments.jsonl");
  write_manifest_line(posts, manifest);
  write_manifest_line(comments, manifest);
  for (const auto& t : ds.threads) {
    posts << post_record(t.question).dump() << '\n';
    for (const auto& c : t.comments_on_question) comments << comment_record(c).dump() << '\n';
    for (const auto& a : t.answers) {
      posts << post_record(a).dump() << '\n';
      for (const auto& c : t.comments_for(a.post_id)) comments << comment_record(c).dump() << '\n';
    }
  }

  std::vector<const User*> users;
  users.reserve(ds.users.size());
  for (const auto& [id, u] : ds.users) users.push_back(&u);
  std::sort(users.begin(), users.end(), [](const User* a, const User* b) { return a->user_id < b->user_id; });
  auto uout = open_output(dir / "users.jsonl");
  write_manifest_line(uout, manifest);
  for (const User* u : users) {
    uout << json{{"id", u->user_id},         {"reputation", u->reputation},
                 {"gold", u->gold},          {"silver", u->silver},
                 {"bronze", u->bronze},      {"q_count", u->q_count},
                 {"a_count", u->a_count},    {"up_votes", u->up_vote_count},
                 {"down_votes", u->down_vote_count}, {"views", u->view_count},
                 {"accept_rate", opt(u->accept_rate)}}
                .dump()
         << '\n';
  }

  auto iout = open_output(dir / "instances.jsonl");
  write_manifest_line(iout, manifest);
  for (const auto& inst : ds.instances) {
    iout << json{{"question", inst.question_id}, {"answer", inst.answer_id}, {"label", inst.label}}.dump() << '\n';
  }
  if (!posts || !comments || !uout || !iout) throw DataError("failed writing dataset to " + dir.string());
}

Dataset read_dataset(const std::filesystem::path& dir) {
  std::vector<Post> posts;
  read_records(dir / "posts.jsonl", [&](const json& j) {
    Post p;
    p.post_id = j.at("id").get<Id>();
    p.kind = j.at("kind").get<std::string>() == "question" ? PostKind::question : PostKind::answer;
    p.creation_time = j.at("created_ms").get<Timestamp>();
    p.score = j.at("score").get<std::int64_t>();
    p.owner = get_opt<Id>(j, "owner");
    p.accepted_answer_id = get_opt<Id>(j, "accepted");
    p.parent_id = get_opt<Id>(j, "parent");
    p.body_html = j.at("body").get<std::string>();
    p.body_text = strip_html(p.body_html);
    posts.push_back(std::move(p));
  });
  std::vector<Comment> comments;
  read_records(dir / "comments.jsonl", [&](const json& j) {
    Comment c;
    c.comment_id = j.at("id").get<Id>();
    c.post_id = j.at("post").get<Id>();
    c.author = get_opt<Id>(j, "author");
    c.creation_time = j.at("created_ms").get<Timestamp>();
    c.text = j.at("text").get<std::string>();
    comments.push_back(std::move(c));
  });
  std::vector<User> users;
  read_records(dir / "users.jsonl", [&](const json& j) {
    User u;
    u.user_id = j.at("id").get<Id>();
    u.reputation = j.at("reputation").get<std::int64_t>();
    u.gold = j.at("gold").get<std::int64_t>();
    u.silver = j.at("silver").get<std::int64_t>();
    u.bronze = j.at("bronze").get<std::int64_t>();
    u.q_count = j.at("q_count").get<std::int64_t>();
    u.a_count = j.at("a_count").get<std::int64_t>();
    u.up_vote_count = j.at("up_votes").get<std::int64_t>();
    u.down_vote_count = j.at("down_votes").get<std::int64_t>();
    u.view_count = j.at("views").get<std::int64_t>();
    u.accept_rate = get_opt<double>(j, "accept_rate");
    users.push_back(u);
  });
  auto ds = build_dataset(std::move(posts), std::move(comments), std::move(users));

  std::size_t stored = 0;
  read_records(dir / "instances.jsonl", [&](const json& j) {
    if (stored >= ds.instances.size() || ds.instances[stored].answer_id != j.at("answer").get<Id>() ||
        ds.instances[stored].label != j.at("label").get<int>()) {
      throw DataError(dir.string() + ": instances.jsonl disagrees with posts.jsonl at record " +
                      std::to_string(stored + 1));
    }
    ++stored;
  });
  if (stored != ds.instances.size()) throw DataError(dir.string() + ": instances.jsonl is truncated");
  return ds;
}

Dataset load_dump(const std::filesystem::path& dir, DumpStats* stats) {
  DumpStats local;
  DumpStats& st = stats ? *stats : local;
  auto require = [&](const char* name) {
    const auto path = dir / name;
    if (!std::filesystem::is_regular_file(path)) throw DataError("missing dump file " + path.string());
    return open_input(path);
  };
  auto posts_in = require("Posts.xml");
  auto users_in = require("Users.xml");
  auto comments_in = require("Comments.xml");
  auto users = parse_users(users_in, &st.users);
  if (std::filesystem::is_regular_file(dir / "Badges.xml")) {
    auto badges_in = open_input(dir / "Badges.xml");
    attach_badges(users, parse_badges(badges_in, &st.badges));
    st.has_badges = true;
  }
  auto ds = build_dataset(parse_posts(posts_in, &st.posts), parse_comments(comments_in, &st.comments), std::move(users));
  derive_user_stats(ds.threads, ds.users);
  return ds;
}

}  // namespace cqa
