#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cqa/artifact.hpp"
#include "cqa/learner/matrix.hpp"
#include "cqa/learner/tree.hpp"

namespace cqa {

struct TrainConfig {
  int n_trees = 300;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_samples_leaf = 20;
  double min_gain = 0.0;
  int n_bins = 255;
  double lambda = 1.0;
  std::uint64_t seed = 42;
  double positive_weight = 1.0;

  void validate() const;
};

nlohmann::ordered_json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::ordered_json& j, TrainConfig base = {});

// Logistic loss derivatives with respect to the margin.
struct LogisticDerivatives {
  double gradient;  // p - y
  double hessian;   // p (1 - p)
};
LogisticDerivatives logistic_derivatives(double margin, int label);
double logistic_loss(double margin, int label);
double sigmoid(double margin);

struct FeatureImportance {
  std::string feature;
  double average_gain = 0;
  std::int64_t splits = 0;
};

class GbdtModel {
 public:
  double base_score = 0;  // log-odds of the (weighted) training prior
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
  std::vector<double> gain_sum;
  std::vector<std::int64_t> split_count;
  TrainConfig config;

  std::size_t arity() const { return feature_names.size(); }
  double margin(std::span<const double> x) const;
  double predict(std::span<const double> x) const;  // throws on arity mismatch
  std::vector<double> predict(const Matrix& x) const;

  // Average split gain per feature, descending (ties by column order).
  std::vector<FeatureImportance> importance() const;

  void save(const std::filesystem::path& path, const Manifest& manifest) const;
  static GbdtModel load(const std::filesystem::path& path);
};

// Newton boosting on logistic loss with leaf-wise histogram trees.
// `on_iteration(t, training_loss)` sees the mean training loss after tree t.
GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const TrainConfig& config,
                     std::vector<std::string> feature_names = {},
                     const std::function<void(int, double)>& on_iteration = {});

// Shared label check: y must be 0/1 with both classes present.
void check_binary_labels(std::span<const int> y, std::size_t rows);

}  // namespace cqa
