#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqa/artifact.hpp"
#include "cqa/learner/matrix.hpp"
#include "cqa/learner/tree.hpp"

namespace cqa {

struct ForestConfig {
  int n_trees = 300;
  int max_leaves = 0;          // 0 = grow until pure or min_samples_leaf
  int max_depth = -1;
  int min_samples_leaf = 1;
  int features_per_node = 0;   // 0 = round(sqrt(d))
  bool bootstrap = true;
  int n_bins = 255;
  std::uint64_t seed = 42;

  void validate() const;
};

nlohmann::ordered_json to_json(const ForestConfig& c);
ForestConfig forest_config_from_json(const nlohmann::ordered_json& j, ForestConfig base = {});

// Trees are grown with the shared leaf-wise grower on g = prior - y, h = 1 and
// no regularisation, which makes the split gain the Gini (variance) decrease
// and each leaf output the class-1 frequency of the leaf minus the prior.
class ForestModel {
 public:
  double prior = 0;
  std::vector<Tree> trees;
  // Out-of-bag probability per training row; NaN for rows that were in every bootstrap.
  std::vector<double> oob_scores;

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;
};

ForestModel train_random_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config);

}  // namespace cqa
