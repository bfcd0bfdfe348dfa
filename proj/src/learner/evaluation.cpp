#include "cqa/learner/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "cqa/error.hpp"

namespace cqa {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw UsageError("auc: score/label length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        positive_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");
  const double np = static_cast<double>(n_pos);
  return (positive_rank_sum - np * (np + 1) / 2) / (np * static_cast<double>(n_neg));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw UsageError("paired_t_test: need two equal-length samples of size >= 2");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.df = static_cast<int>(n - 1);
  if (sd == 0.0) {
    if (mean == 0.0) return r;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

std::vector<int> grouped_stratified_kfold(std::span<const Id> groups, std::span<const int> labels, int k,
                                          std::uint64_t seed) {
  if (k < 2) throw UsageError("k-fold: k must be >= 2");
  if (groups.size() != labels.size()) throw UsageError("k-fold: group/label length mismatch");
  struct Group {
    Id id;
    std::size_t size = 0;
    std::size_t positives = 0;
  };
  std::vector<Group> unique;
  std::unordered_map<Id, std::size_t> slot;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto [it, inserted] = slot.emplace(groups[i], unique.size());
    if (inserted) unique.push_back({groups[i]});
    ++unique[it->second].size;
    unique[it->second].positives += labels[i] == 1;
  }
  if (unique.size() < static_cast<std::size_t>(k)) {
    throw DataError("k-fold: " + std::to_string(unique.size()) + " groups cannot fill " + std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(unique.begin(), unique.end(), rng);
  std::stable_sort(unique.begin(), unique.end(), [](const Group& a, const Group& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.positives > b.positives;
  });
  std::unordered_map<Id, int> fold_of;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const std::size_t round = i / static_cast<std::size_t>(k);
    const std::size_t pos = i % static_cast<std::size_t>(k);
    const auto fold = static_cast<int>(round % 2 == 0 ? pos : static_cast<std::size_t>(k) - 1 - pos);
    fold_of.emplace(unique[i].id, fold);
  }
  std::vector<int> folds(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) folds[i] = fold_of.at(groups[i]);
  return folds;
}

std::string to_string(Classifier c) { return c == Classifier::gbdt ? "gbdt" : "rf"; }

Classifier parse_classifier(const std::string& name) {
  if (name == "gbdt" || name == "lgb") return Classifier::gbdt;
  if (name == "rf" || name == "random_forest") return Classifier::random_forest;
  throw UsageError("unknown classifier '" + name + "' (expected gbdt or rf)");
}

nlohmann::ordered_json to_json(const LearnerConfig& c) {
  nlohmann::ordered_json j{{"classifier", to_string(c.classifier)}};
  if (c.classifier == Classifier::gbdt) {
    j["gbdt"] = to_json(c.gbdt);
  } else {
    j["rf"] = to_json(c.forest);
  }
  return j;
}

std::vector<double> fit_predict(const LearnerConfig& config, const Matrix& train_x, std::span<const int> train_y,
                                const Matrix& test_x) {
  if (config.classifier == Classifier::gbdt) return train_gbdt(train_x, train_y, config.gbdt).predict(test_x);
  return train_random_forest(train_x, train_y, config.forest).predict(test_x);
}

void EvaluationReport::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "fold,auc\n";
  for (std::size_t f = 0; f < fold_auc.size(); ++f) out << f << ',' << fold_auc[f] << '\n';
  out << "mean," << mean << '\n' << "stddev," << stddev << '\n';
  if (versus_baseline) {
    out << "t_vs_" << baseline_id << ',' << versus_baseline->t << '\n'
        << "p_vs_" << baseline_id << ',' << versus_baseline->p << '\n';
  }
}

EvaluationReport cross_validate(const Matrix& x, std::span<const int> labels, std::span<const int> folds, int k,
                                const LearnerConfig& config) {
  if (folds.size() != x.rows() || labels.size() != x.rows()) throw UsageError("cross_validate: length mismatch");
  EvaluationReport report;
  report.fingerprint = to_json(config).dump();
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(i);
    if (test.empty()) throw DataError("cross_validate: fold " + std::to_string(f) + " is empty");
    std::vector<int> train_y, test_y;
    for (auto i : train) train_y.push_back(labels[i]);
    for (auto i : test) test_y.push_back(labels[i]);
    const auto scores = fit_predict(config, x.select_rows(train), train_y, x.select_rows(test));
    report.fold_auc.push_back(auc(scores, test_y));
  }
  const double n = static_cast<double>(k);
  report.mean = std::accumulate(report.fold_auc.begin(), report.fold_auc.end(), 0.0) / n;
  double ss = 0;
  for (double a : report.fold_auc) ss += (a - report.mean) * (a - report.mean);
  report.stddev = std::sqrt(ss / (n - 1));
  return report;
}

}  // namespace cqa
