#include <cmath>
#include <numeric>
#include <random>

#include "cqa/error.hpp"
#include "cqa/topic_features.hpp"
#include "cqa/topic_model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cqa;

namespace {

LdaCorpus corpus_of(const std::vector<std::vector<std::string>>& docs) { return build_lda_corpus(docs, {}, 1); }

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
  std::gamma_distribution<double> g(0.5, 1.0);
  std::vector<double> p(k);
  for (auto& x : p) x = g(rng) + 1e-6;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return p;
}

const test::PlantedCorpus& planted() {
  static const auto p = test::make_planted_corpus({});
  return p;
}

}  // namespace

TEST_SUITE("topic_features") {
  TEST_CASE("lda corpus building") {
    const auto c = build_lda_corpus({{"the", "cat", "sat"}, {"cat", "dog"}, {"dog", "the", "emu"}}, default_stopwords(), 2);
    CHECK(c.vocabulary == std::vector<std::string>{"cat", "dog"});
    CHECK(c.documents.size() == 3);
    CHECK(c.documents[0] == Document{0});
    CHECK(c.token_count() == 4);
    CHECK(default_stopwords().contains("the"));
  }

  TEST_CASE("training validates its inputs") {
    const auto c = corpus_of({{"a", "b"}});
    LdaConfig cfg;
    cfg.topics = 1;
    CHECK_THROWS_AS(train_lda(c, cfg), UsageError);
    cfg.topics = 3;
    CHECK_THROWS_AS(train_lda(c, cfg), UsageError);  // more topics than tokens
    cfg.topics = 2;
    cfg.beta = 0;
    CHECK_THROWS_AS(train_lda(c, cfg), UsageError);
    CHECK_THROWS_AS(train_lda(LdaCorpus{}, LdaConfig{}), UsageError);
    cfg.beta = 0.01;
    cfg.train_iterations = 5;
    const auto with_empty = corpus_of({{"a", "b"}, {}, {"b"}});
    CHECK_NOTHROW(train_lda(with_empty, cfg));
  }

  TEST_CASE("gibbs sweeps conserve counts") {
    const auto& p = planted();
    LdaConfig cfg;
    cfg.topics = 5;
    cfg.train_iterations = 20;
    const auto tokens = static_cast<std::int64_t>(p.corpus.token_count());
    int sweeps = 0;
    train_lda(p.corpus, cfg, [&](int, const TopicModel& m) {
      ++sweeps;
      std::int64_t total = 0;
      for (int k = 0; k < m.topics(); ++k) {
        std::int64_t row = 0;
        for (std::uint32_t w = 0; w < m.vocabulary_size(); ++w) {
          CHECK(m.topic_word(k, w) >= 0);
          row += m.topic_word(k, w);
        }
        CHECK(row == m.topic_total(k));
        total += m.topic_total(k);
      }
      CHECK(total == tokens);
    });
    CHECK(sweeps == 20);
  }

  TEST_CASE("planted topics are recovered and the topic count is selected") {
    const auto& p = planted();
    LdaConfig cfg;
    cfg.topics = 5;
    cfg.seed = 3;
    const auto model = train_lda(p.corpus, cfg);
    CHECK(model.alpha() == doctest::Approx(10.0));
    CHECK(test::planted_topic_distance(model, p) <= 0.15);
    CHECK(train_lda(p.corpus, cfg) == model);

    const std::vector<int> grid{2, 5, 20};
    const auto sel = select_topic_count(p.corpus, grid, cfg);
    CHECK(sel.best_topics == 5);
    REQUIRE(sel.table.size() == 3);
    CHECK(sel.table[1].first == 5);
    CHECK(sel.best_model.topics() == 5);

    const std::vector<int> single{5};
    CHECK(select_topic_count(p.corpus, single, cfg).best_topics == 5);

    // Random assignments (no sweeps) make less coherent topics.
    LdaConfig random = cfg;
    random.train_iterations = 0;
    CHECK(coherence(model, p.corpus).mean > coherence(train_lda(p.corpus, random), p.corpus).mean);

    // A long document of one planted topic's words is assigned to that topic.
    for (int k = 0; k < 5; ++k) {
      const auto words = test::planted_words(p, k);
      Document doc;
      for (int i = 0; i < 400; ++i) doc.push_back(words[static_cast<std::size_t>(i) % words.size()]);
      const auto theta = infer(model, doc, 100, 5);
      CHECK(*std::max_element(theta.begin(), theta.end()) > 0.8);
    }
  }

  TEST_CASE("coherence closed forms") {
    // Every document holds all four words: each pair scores ln((D+1)/D).
    std::vector<std::vector<std::string>> always(10, {"w", "x", "y", "z"});
    const auto c1 = corpus_of(always);
    LdaConfig cfg;
    cfg.topics = 2;
    cfg.train_iterations = 10;
    const auto m1 = train_lda(c1, cfg);
    const auto coh1 = coherence(m1, c1, 4);
    for (double v : coh1.per_topic) CHECK(v == doctest::Approx(6 * std::log(11.0 / 10.0)).epsilon(1e-12));
    CHECK(coh1.mean > 0);

    // Words never share a document; each occurs in 5 documents.
    std::vector<std::vector<std::string>> never;
    for (int d = 0; d < 20; ++d) never.push_back({std::string(1, static_cast<char>('w' + d % 4))});
    const auto c2 = corpus_of(never);
    const auto m2 = train_lda(c2, cfg);
    const auto coh2 = coherence(m2, c2, 4);
    for (double v : coh2.per_topic) CHECK(v == doctest::Approx(6 * std::log(1.0 / 5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(coherence(m2, c2, 1), UsageError);
  }

  TEST_CASE("inference") {
    const auto& p = planted();
    LdaConfig cfg;
    cfg.topics = 5;
    cfg.train_iterations = 50;
    const auto model = train_lda(p.corpus, cfg);
    const auto uniform = infer(model, {}, 100, 1);
    for (double x : uniform) CHECK(x == doctest::Approx(0.2));
    const auto theta = infer(model, p.corpus.documents[0], 100, 9);
    CHECK(std::accumulate(theta.begin(), theta.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double x : theta) CHECK(x > 0);
    CHECK(infer(model, p.corpus.documents[0], 100, 9) == theta);
  }

  TEST_CASE("model files round-trip") {
    const auto& p = planted();
    LdaConfig cfg;
    cfg.topics = 5;
    cfg.train_iterations = 10;
    const auto model = train_lda(p.corpus, cfg);
    const auto path = test::scratch_dir("lda") / "model.txt";
    model.save(path, Manifest{{"command", "test"}});
    CHECK(TopicModel::load(path) == model);
    CHECK(model.encode({"t0w0", "nope", "t1w3"}).size() == 2);
  }

  TEST_CASE("divergence oracles") {
    const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
    CHECK(kl(p, q) == doctest::Approx(0.14384103622589042).epsilon(1e-12));
    CHECK(kl(q, p) == doctest::Approx(0.13081203594113697).epsilon(1e-12));
    CHECK(r2(std::vector<double>{0.8, 0.2}, std::vector<double>{0.6, 0.4}) ==
          doctest::Approx(0.5555555555555554).epsilon(1e-12));
    CHECK(jsd(p, p) == 0);
    CHECK(kl(p, p) == 0);
    CHECK(cosine(p, p) == doctest::Approx(1.0));
    CHECK(r2(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) == 1);
    CHECK(r2(std::vector<double>{0.5, 0.5}, std::vector<double>{0.6, 0.4}) == kR2Floor);
    CHECK_THROWS(kl(p, std::vector<double>{1.0}));

    const auto same = extract_textual(q, q);
    CHECK(same.kl_q_a == 0);
    CHECK(same.kl_a_q == 0);
    CHECK(same.jsd == 0);
    CHECK(same.r2 == 1);
    CHECK(same.cosine == doctest::Approx(1.0).epsilon(1e-15));
    const auto f = extract_textual(p, q);
    CHECK(f.kl_q_a == kl(p, q));
    CHECK(f.kl_a_q == kl(q, p));
    CHECK(f.kl_q_a != f.kl_a_q);
  }

  TEST_CASE("divergence properties on random simplex pairs") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t k = 2 + rng() % 30;
      const auto p = random_simplex(rng, k);
      const auto q = random_simplex(rng, k);
      CHECK(kl(p, q) >= 0);
      CHECK(kl(p, p) == doctest::Approx(0).epsilon(1e-9));
      const double j = jsd(p, q);
      CHECK(j >= 0);
      CHECK(j <= std::log(2.0) + 1e-12);
      CHECK(j == doctest::Approx(jsd(q, p)).epsilon(1e-12));
      const double c = cosine(p, q);
      CHECK(c >= 0);
      CHECK(c <= 1 + 1e-12);
      CHECK(r2(p, q) <= 1);
      CHECK(r2(p, p) == doctest::Approx(1.0));
    }
  }
}
