#include "cqa/learner/forest.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cqa/error.hpp"
#include "cqa/learner/gbdt.hpp"

namespace cqa {

void ForestConfig::validate() const {
  if (n_trees < 1) throw UsageError("n_trees must be >= 1");
  if (min_samples_leaf < 1) throw UsageError("min_samples_leaf must be >= 1");
  if (max_leaves < 0 || max_leaves == 1) throw UsageError("max_leaves must be 0 or >= 2");
  if (features_per_node < 0) throw UsageError("features_per_node must be >= 0");
  if (n_bins < 2 || n_bins > 65535) throw UsageError("n_bins must be in [2, 65535]");
}

nlohmann::ordered_json to_json(const ForestConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_leaves", c.max_leaves},
          {"max_depth", c.max_depth},
          {"min_samples_leaf", c.min_samples_leaf},
          {"features_per_node", c.features_per_node},
          {"bootstrap", c.bootstrap},
          {"n_bins", c.n_bins},
          {"seed", c.seed}};
}

ForestConfig forest_config_from_json(const nlohmann::ordered_json& j, ForestConfig c) {
  c.n_trees = j.value("n_trees", c.n_trees);
  c.max_leaves = j.value("max_leaves", c.max_leaves);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  c.features_per_node = j.value("features_per_node", c.features_per_node);
  c.bootstrap = j.value("bootstrap", c.bootstrap);
  c.n_bins = j.value("n_bins", c.n_bins);
  c.seed = j.value("seed", c.seed);
  return c;
}

double ForestModel::predict(std::span<const double> x) const {
  double sum = 0;
  for (const auto& t : trees) sum += t.predict(x);
  return prior + sum / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

ForestModel train_random_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config) {
  config.validate();
  check_binary_labels(y, x.rows());
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();

  ForestModel model;
  model.prior = static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / static_cast<double>(n);
  std::vector<double> grad(n), hess(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) grad[i] = model.prior - y[i];

  const BinnedMatrix binned(x, config.n_bins);
  TreeParams params;
  params.split.lambda = 0.0;
  params.split.min_samples_leaf = config.min_samples_leaf;
  params.split.min_hessian = 0.0;
  params.split.min_gain = 0.0;
  params.max_leaves = config.max_leaves;
  params.max_depth = config.max_depth;
  params.features_per_node = config.features_per_node > 0
                                 ? config.features_per_node
                                 : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::uint32_t> draw(0, static_cast<std::uint32_t>(n - 1));
  std::vector<double> oob_sum(n, 0.0);
  std::vector<int> oob_n(n, 0);
  std::vector<char> in_bag(n);
  for (int t = 0; t < config.n_trees; ++t) {
    std::vector<std::uint32_t> rows(n);
    if (config.bootstrap) {
      for (auto& r : rows) r = draw(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0u);
    }
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (auto r : rows) in_bag[r] = 1;
    auto tree = grow_tree(binned, grad, hess, std::move(rows), params, &rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      oob_sum[i] += model.prior + tree.predict(x.row(i));
      ++oob_n[i];
    }
    model.trees.push_back(std::move(tree));
  }
  model.oob_scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    model.oob_scores[i] = oob_n[i] > 0 ? oob_sum[i] / oob_n[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return model;
}

}  // namespace cqa
