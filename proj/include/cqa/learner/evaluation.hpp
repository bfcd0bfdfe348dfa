#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cqa/corpus.hpp"
#include "cqa/learner/forest.hpp"
#include "cqa/learner/gbdt.hpp"
#include "cqa/learner/matrix.hpp"

namespace cqa {

// Mann-Whitney AUC with midranks: P(s+ > s-) + 1/2 P(s+ = s-).
double auc(std::span<const double> scores, std::span<const int> labels);

struct TTestResult {
  double t = 0;
  double p = 1;
  int df = 0;
};

// Two-sided paired t-test on a - b. Zero variance of the differences gives
// t = 0, p = 1 for a zero mean and t = +/-inf, p = 0 otherwise.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Fold index per instance. All instances sharing a group id land in the same
// fold; groups are shuffled (seeded) and dealt largest-first in serpentine
// order, which balances group count exactly and instance count (hence the
// positive rate when each group has one positive) approximately.
std::vector<int> grouped_stratified_kfold(std::span<const Id> groups, std::span<const int> labels, int k,
                                          std::uint64_t seed);

enum class Classifier { gbdt, random_forest };
std::string to_string(Classifier c);
Classifier parse_classifier(const std::string& name);

struct LearnerConfig {
  Classifier classifier = Classifier::gbdt;
  TrainConfig gbdt;
  ForestConfig forest;
};

nlohmann::ordered_json to_json(const LearnerConfig& c);

std::vector<double> fit_predict(const LearnerConfig& config, const Matrix& train_x, std::span<const int> train_y,
                                const Matrix& test_x);

struct EvaluationReport {
  std::vector<double> fold_auc;
  double mean = 0;
  double stddev = 0;  // sample standard deviation
  std::string fingerprint;
  std::optional<TTestResult> versus_baseline;
  std::string baseline_id;

  void write_csv(std::ostream& out) const;
};

// Trains on k-1 folds and scores the held-out fold, for every fold.
EvaluationReport cross_validate(const Matrix& x, std::span<const int> labels, std::span<const int> folds, int k,
                                const LearnerConfig& config);

}  // namespace cqa
