#include <cmath>
#include <random>
#include <sstream>

#include "cqa/error.hpp"
#include "cqa/feature_table.hpp"
#include "cqa/selection.hpp"
#include "cqa/topic_model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cqa;

namespace {

std::size_t column(const FeatureTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i].name == name) return i;
  }
  FAIL("no column " << name);
  return 0;
}

bool same_cells(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double x = a(r, c), y = b(r, c);
      if (std::isnan(x) != std::isnan(y) || (!std::isnan(x) && x != y)) return false;
    }
  }
  return true;
}

// Hand-built table: s.signal decides the label, every other column is noise.
FeatureTable planted_table(std::size_t questions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FeatureTable t;
  for (Group g : {Group::S, Group::A, Group::Q, Group::Diff, Group::UR}) {
    const auto p = column_prefix(g);
    for (const char* n : {"signal", "noise"}) {
      t.columns.push_back({p + "." + n, g, Variant::raw});
      t.columns.push_back({p + "." + n + ".prank", g, Variant::prank});
    }
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t q = 0; q < questions; ++q) {
    const std::size_t answers = 2 + rng() % 3;
    const std::size_t best = rng() % answers;
    for (std::size_t a = 0; a < answers; ++a) {
      t.question_ids.push_back(static_cast<Id>(q + 1));
      t.answer_ids.push_back(static_cast<Id>(1000 + t.answer_ids.size()));
      t.labels.push_back(a == best);
      std::vector<double> row;
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        const bool s_signal = c == 0 || c == 1;
        row.push_back(s_signal ? (a == best ? 1.0 : 0.0) + 0.3 * normal(rng) : normal(rng));
      }
      rows.push_back(row);
    }
  }
  t.values = Matrix(rows.size(), t.columns.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.values(r, c) = rows[r][c];
  }
  return t;
}

LearnerConfig small_gbdt() {
  LearnerConfig cfg;
  cfg.gbdt.n_trees = 30;
  return cfg;
}

}  // namespace

TEST_SUITE("feature_table") {
  TEST_CASE("group sets") {
    const auto set = parse_group_set("S,UR,A", true);
    CHECK(set.label() == "S+UR+A+PR");
    CHECK(set.key() == "S+A+UR+PR");
    CHECK_FALSE(set.includes_difference());
    CHECK(set.with(Group::Q).includes_difference());
    CHECK(parse_group_set("all", false).groups.size() == 5);
    CHECK(parse_group_set("s,t", false).label() == "S+T");
    CHECK_THROWS_AS(parse_group_set("S,X", true), UsageError);
    CHECK_THROWS_AS(parse_group_set("S,S", true), UsageError);
    CHECK_THROWS_AS(parse_group_set("DIFF", true), UsageError);
    CHECK_THROWS_AS(parse_group_set("", true), UsageError);
  }

  TEST_CASE("fixture table") {
    const auto ds = test::load_dump(CQA_TEST_DATA);
    const auto t = build_feature_table(ds, nullptr);
    CHECK(t.rows() == 3);
    CHECK(t.columns.size() == (15 + 10 + 10 + 10 + 6) * 3);
    CHECK_FALSE(t.has_group(Group::T));
    CHECK(t.columns[0].name == "s.age");
    CHECK(t.columns[1].name == "s.age.rank");
    CHECK(t.columns[2].name == "s.age.prank");
    CHECK(t.labels == std::vector<int>{0, 1, 0});
    CHECK(t.answer_ids == std::vector<Id>{3, 7, 8});

    const auto age = column(t, "s.age");
    CHECK(t.values(1, age) == 7200);
    CHECK(t.values(0, age + 1) == 1);  // earliest answer ranks first
    CHECK(t.values(2, age + 2) == 1.0);
    CHECK(t.values(1, age + 2) == doctest::Approx(2.0 / 3));
    const auto score = column(t, "s.rating_score");
    CHECK(t.values(1, score + 1) == 1);
    CHECK(t.values(0, column(t, "a.reputation")) == 500);
    CHECK(t.values(0, column(t, "q.reputation")) == 101);
    CHECK(t.values(0, column(t, "diff.reputation")) == -399);
    CHECK(std::isnan(t.values(2, column(t, "a.reputation"))));
    CHECK(std::isnan(t.values(2, column(t, "a.reputation.rank"))));
    CHECK(std::isnan(t.values(2, column(t, "diff.reputation"))));
    CHECK(std::isnan(t.values(2, column(t, "ur.aq_send_edge"))));
    CHECK(t.values(1, column(t, "ur.qa_send_edge")) == 2);
  }

  TEST_CASE("column selection follows the group rules") {
    const auto ds = test::load_dump(CQA_TEST_DATA);
    const auto t = build_feature_table(ds, nullptr);
    auto names = [&](const std::string& groups, bool pr) {
      return t.column_names(t.column_indices(parse_group_set(groups, pr)));
    };
    auto any_prefix = [](const std::vector<std::string>& cols, const std::string& p) {
      return std::any_of(cols.begin(), cols.end(), [&](const std::string& c) { return c.starts_with(p); });
    };
    auto any_suffix = [](const std::vector<std::string>& cols, const std::string& s) {
      return std::any_of(cols.begin(), cols.end(), [&](const std::string& c) { return c.ends_with(s); });
    };
    CHECK(any_prefix(names("A,Q", true), "diff."));
    CHECK_FALSE(any_prefix(names("A", true), "diff."));
    CHECK_FALSE(any_prefix(names("A,UR", true), "diff."));
    CHECK(any_suffix(names("S", true), ".prank"));
    CHECK_FALSE(any_suffix(names("S", false), ".prank"));
    CHECK(any_suffix(names("S", false), ".rank"));
    CHECK(names("S", false).size() == 30);
  }

  TEST_CASE("csv round trip is exact") {
    const auto dir = test::scratch_dir("features_csv");
    test::write_synthetic_dump(dir, test::SyntheticDumpSpec{.questions = 60, .seed = 2});
    const auto ds = test::load_dump(dir);
    const auto t = build_feature_table(ds, nullptr);
    std::vector<std::size_t> all(t.columns.size());
    std::iota(all.begin(), all.end(), 0);
    const auto path = dir / "features.csv";
    {
      auto out = open_output(path);
      t.write_csv(out, Manifest{{"command", "test"}}, all);
    }
    const auto back = FeatureTable::read_csv(path);
    CHECK(back.labels == t.labels);
    CHECK(back.question_ids == t.question_ids);
    CHECK(back.column_names(all) == t.column_names(all));
    CHECK(same_cells(back.values, t.values));
    std::ostringstream a, b;
    t.write_csv(a, Manifest{{"command", "test"}}, all);
    build_feature_table(ds, nullptr).write_csv(b, Manifest{{"command", "test"}}, all);
    CHECK(a.str() == b.str());
  }

  TEST_CASE("topic columns") {
    const auto dir = test::scratch_dir("features_topics");
    test::write_synthetic_dump(dir, test::SyntheticDumpSpec{.questions = 60, .seed = 4});
    const auto ds = test::load_dump(dir);
    const auto corpus = build_lda_corpus(lda_documents(ds), default_stopwords());
    LdaConfig cfg;
    cfg.topics = 5;
    cfg.train_iterations = 50;
    const auto model = train_lda(corpus, cfg);
    const auto t = build_feature_table(ds, &model);
    CHECK(t.has_group(Group::T));
    const auto kl = column(t, "t.kl_q_a");
    const auto jsd = column(t, "t.jsd");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      CHECK(t.values(r, kl) >= 0);
      CHECK(t.values(r, jsd) <= std::log(2.0) + 1e-12);
      CHECK(t.values(r, column(t, "t.r2")) <= 1);
    }
    CHECK(same_cells(build_feature_table(ds, &model).values, t.values));
  }
}

TEST_SUITE("selection") {
  TEST_CASE("greedy selection finds the informative group") {
    const auto t = planted_table(120, 3);
    const std::vector<int> folds = grouped_stratified_kfold(t.question_ids, t.labels, 5, 1);
    const std::vector<Group> groups{Group::S, Group::A, Group::Q, Group::UR};
    const auto trace = greedy_select(t, groups, true, small_gbdt(), folds, 5);
    REQUIRE(trace.steps.size() == 4);
    CHECK(trace.steps[0].added == Group::S);
    CHECK(trace.steps[0].report.mean > 0.9);
    CHECK(trace.steps[0].candidates.size() == 4);
    CHECK_FALSE(trace.steps[0].vs_previous.has_value());
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
      CHECK(trace.steps[s].set.groups.size() == s + 1);
      CHECK(trace.steps[s].candidates.size() == 4 - s);
      if (s > 0) CHECK(trace.steps[s].vs_previous.has_value());
      // difference columns iff both A and Q are present
      const auto cols = t.column_names(t.column_indices(trace.steps[s].set));
      const bool has_diff =
          std::any_of(cols.begin(), cols.end(), [](const std::string& c) { return c.starts_with("diff."); });
      CHECK(has_diff == trace.steps[s].set.includes_difference());
    }

    std::ostringstream a, b;
    trace.write_csv(a);
    greedy_select(t, groups, true, small_gbdt(), folds, 5).write_csv(b);
    CHECK(a.str() == b.str());

    const std::vector<Group> only_s{Group::S};
    CHECK(greedy_select(t, only_s, true, small_gbdt(), folds, 5).steps.size() == 1);
  }

  TEST_CASE("auc table and importance reports") {
    std::vector<AucCell> cells{{"S+UR+PR", 2, Classifier::gbdt, 0.9504},
                               {"S+PR", 1, Classifier::random_forest, 0.9},
                               {"S+PR", 1, Classifier::gbdt, 0.94449},
                               {"Q+PR", 1, Classifier::gbdt, 0.5}};
    const auto table = report_table(cells);
    CHECK(table.rows == std::vector<std::string>{"Q+PR", "S+PR", "S+UR+PR"});
    CHECK(table.columns == std::vector<Classifier>{Classifier::gbdt, Classifier::random_forest});
    std::ostringstream csv;
    table.write_csv(csv);
    CHECK(csv.str() == "feature_group,gbdt,rf\nQ+PR,0.500,\nS+PR,0.944,0.900\nS+UR+PR,0.950,\n");
    std::ostringstream text;
    table.write_text(text);
    CHECK(text.str().find("S+UR+PR       | 0.950  | -") != std::string::npos);

    const auto t = planted_table(80, 5);
    const std::vector<std::size_t> cols{0, 2, 4, 6};
    const auto model = train_gbdt(t.select(cols), t.labels, small_gbdt().gbdt, t.column_names(cols));
    const auto rows = report_importance(model, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].feature == "s.signal");
    CHECK(rows[0].group == "S");
    std::ostringstream svg;
    write_importance_svg(svg, rows);
    CHECK(svg.str().starts_with("<svg"));
    CHECK(svg.str().find("s.signal") != std::string::npos);
    std::ostringstream imp;
    write_importance_csv(imp, rows);
    CHECK(imp.str().starts_with("rank,feature,group,average_gain,splits\n1,s.signal,S,"));
  }
}
