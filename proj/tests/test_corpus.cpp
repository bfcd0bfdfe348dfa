#include <fstream>
#include <sstream>

#include "cqa/corpus.hpp"
#include "cqa/dataset_io.hpp"
#include "cqa/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cqa;

namespace {

std::ifstream fixture(const char* name) {
  std::ifstream in(std::string(CQA_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  return in;
}

Dataset fixture_dataset() {
  auto pin = fixture("Posts.xml");
  auto uin = fixture("Users.xml");
  auto cin = fixture("Comments.xml");
  auto bin = fixture("Badges.xml");
  auto users = parse_users(uin);
  attach_badges(users, parse_badges(bin));
  auto ds = build_dataset(parse_posts(pin), parse_comments(cin), std::move(users));
  derive_user_stats(ds.threads, ds.users);
  return ds;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("timestamps parse as UTC milliseconds") {
    CHECK(parse_timestamp("1970-01-01T00:00:00") == 0);
    CHECK(parse_timestamp("1970-01-02T00:00:01.250") == 86'401'250);
    CHECK(parse_timestamp("2014-04-01T11:00:00.000") - parse_timestamp("2014-04-01T10:00:00.000") == 3'600'000);
    CHECK(format_timestamp(parse_timestamp("2019-12-31T23:59:58.123")) == "2019-12-31T23:59:58.123");
    CHECK_THROWS_AS(parse_timestamp("2014-13-01T00:00:00"), DataError);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), DataError);
  }

  TEST_CASE("posts map attributes and skip other post types") {
    auto in = fixture("Posts.xml");
    ParseStats stats;
    const auto posts = parse_posts(in, &stats);
    CHECK(stats.rows == 9);
    CHECK(stats.skipped_other_type == 1);         // tag wiki
    CHECK(stats.skipped_missing_attribute == 1);  // answer without ParentId
    REQUIRE(posts.size() == 7);
    CHECK(posts[0].kind == PostKind::question);
    CHECK(posts[0].accepted_answer_id == 7);
    CHECK_FALSE(posts[0].parent_id.has_value());
    CHECK(posts[1].kind == PostKind::answer);
    CHECK(posts[1].parent_id == 1);
    CHECK(posts[0].body_html == "<p>How do I ask for a raise? I <b>really</b> want one.</p>");
    CHECK(posts[0].body_text == "How do I ask for a raise? I really want one.");
    CHECK_FALSE(posts[3].owner.has_value());
  }

  TEST_CASE("malformed XML reports a line number") {
    std::istringstream in("<posts>\n<row Id=\"1\" PostTypeId=\"1\"\n</posts>");
    try {
      parse_posts(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_posts(empty), DataError);
  }

  TEST_CASE("users and badges") {
    auto uin = fixture("Users.xml");
    auto bin = fixture("Badges.xml");
    ParseStats ustats, bstats;
    auto users = parse_users(uin, &ustats);
    const auto badges = parse_badges(bin, &bstats);
    CHECK(ustats.skipped_missing_attribute == 1);
    REQUIRE(users.size() == 3);
    CHECK(users[0].reputation == 101);
    CHECK(users[0].view_count == 250);
    CHECK(users[0].up_vote_count == 10);
    CHECK(users[0].down_vote_count == 2);
    CHECK(badges.at(12).bronze == 3);
    CHECK(badges.at(12).gold == 1);
    CHECK(bstats.unknown_badge_class == 1);
    CHECK(badges.at(11).bronze == 1);  // unknown class counted as bronze
    attach_badges(users, badges);
    CHECK(users[2].bronze == 3);
    CHECK(users[1].silver == 1);
  }

  TEST_CASE("dataset assembly labels answers and drops incomplete threads") {
    const auto ds = fixture_dataset();
    REQUIRE(ds.threads.size() == 1);
    const auto& t = ds.threads[0];
    CHECK(t.question.post_id == 1);
    REQUIRE(t.answers.size() == 3);
    CHECK(t.answers[0].post_id == 3);
    CHECK(t.answers[1].post_id == 7);
    REQUIRE(ds.instances.size() == 3);
    CHECK(ds.instances[0].label == 0);
    CHECK(ds.instances[1].label == 1);
    CHECK(ds.instances[2].label == 0);
    CHECK(ds.stats.threads_without_accepted == 1);
    CHECK(ds.stats.orphan_answers == 1);
    CHECK(ds.stats.orphan_comments == 1);
    CHECK(t.comments_on_question.size() == 1);
    CHECK(t.comments_for(7).size() == 1);
    CHECK(t.comments_for(3).size() == 1);
    CHECK(t.comments_for(8).empty());
  }

  TEST_CASE("question without accepted answer yields no instances") {
    std::vector<Post> posts(2);
    posts[0].post_id = 1;
    posts[1].post_id = 2;
    posts[1].kind = PostKind::answer;
    posts[1].parent_id = 1;
    const auto ds = build_dataset(posts, {}, {});
    CHECK(ds.instances.empty());
    CHECK(ds.stats.threads_without_accepted == 1);
  }

  TEST_CASE("user statistics derive from retained threads") {
    const auto ds = fixture_dataset();
    const auto& asker = ds.users.at(10);
    CHECK(asker.q_count == 1);
    CHECK(asker.a_count == 0);  // its answer sits in an excluded thread
    CHECK_FALSE(asker.accept_rate.has_value());
    CHECK(ds.users.at(12).a_count == 1);
    CHECK(ds.users.at(12).accept_rate == doctest::Approx(1.0));
    CHECK(ds.users.at(11).accept_rate == doctest::Approx(0.0));

    std::vector<Thread> threads(1);
    threads[0].question.post_id = 1;
    threads[0].question.owner = 5;
    threads[0].question.accepted_answer_id = 11;
    for (Id id = 10; id < 14; ++id) {
      Post a;
      a.post_id = id;
      a.kind = PostKind::answer;
      a.owner = 6;
      threads[0].answers.push_back(a);
    }
    UserIndex users;
    users[5].user_id = 5;
    users[6].user_id = 6;
    derive_user_stats(threads, users);
    CHECK(users[6].a_count == 4);
    CHECK(*users[6].accept_rate == doctest::Approx(0.25));
    CHECK(users[5].q_count == 1);
  }

  TEST_CASE("dataset invariants hold on a generated dump") {
    const auto dir = test::scratch_dir("corpus_invariants");
    test::write_synthetic_dump(dir, test::SyntheticDumpSpec{.questions = 120, .seed = 3});
    const auto ds = test::load_dump(dir);
    std::size_t answers = 0;
    for (const auto& t : ds.threads) answers += t.answers.size();
    CHECK(answers == ds.instances.size());
    std::vector<int> positives(ds.threads.size(), 0);
    for (const auto& inst : ds.instances) {
      const auto& q = ds.threads[inst.thread_index].question;
      CHECK(inst.question_id == q.post_id);
      CHECK((inst.label == 1) == (q.accepted_answer_id == inst.answer_id));
      positives[inst.thread_index] += inst.label;
    }
    for (int p : positives) CHECK(p == 1);
    // Determinism: parsing the same bytes again gives the same instances.
    CHECK(test::load_dump(dir).instances == ds.instances);
  }

  TEST_CASE("internal format round-trips instances") {
    const auto src = test::scratch_dir("roundtrip_src");
    const auto out = test::scratch_dir("roundtrip_out");
    test::write_synthetic_dump(src, test::SyntheticDumpSpec{.questions = 60, .seed = 5});
    const auto ds = test::load_dump(src);
    write_dataset(out, ds, Manifest{{"command", "test"}});
    const auto back = read_dataset(out);
    CHECK(back.instances == ds.instances);
    REQUIRE(back.threads.size() == ds.threads.size());
    for (std::size_t i = 0; i < ds.threads.size(); ++i) {
      CHECK(back.threads[i].question == ds.threads[i].question);
      CHECK(back.threads[i].answers == ds.threads[i].answers);
      CHECK(back.threads[i].comments_by_answer == ds.threads[i].comments_by_answer);
    }
    CHECK(back.users == ds.users);
    CHECK(read_manifest(out / "posts.jsonl")->at("command") == "test");
  }
}
