#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "cqa/learner/matrix.hpp"

namespace cqa {

// Per-feature quantile binning. Bin b holds values v with
// upper(b-1) < v <= upper(b); missing values get the extra bin missing_bin(f).
// When a feature has at most `max_bins` distinct values every value gets its
// own bin, so histogram splits coincide with exact splits.
class BinnedMatrix {
 public:
  BinnedMatrix(const Matrix& x, int max_bins);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return upper_.size(); }
  std::uint16_t bin(std::size_t row, std::size_t feature) const { return bins_[feature * rows_ + row]; }
  std::size_t value_bins(std::size_t feature) const { return upper_[feature].size(); }
  std::uint16_t missing_bin(std::size_t feature) const { return static_cast<std::uint16_t>(upper_[feature].size()); }
  double upper(std::size_t feature, std::size_t b) const { return upper_[feature][b]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint16_t> bins_;  // feature-major
  std::vector<std::vector<double>> upper_;
};

struct GradientPair {
  double g = 0;
  double h = 0;
  std::int64_t n = 0;

  GradientPair& operator+=(const GradientPair& o) {
    g += o.g, h += o.h, n += o.n;
    return *this;
  }
  GradientPair& operator-=(const GradientPair& o) {
    g -= o.g, h -= o.h, n -= o.n;
    return *this;
  }
};

// Gradient/hessian sums per (feature, bin), missing bin last.
class Histogram {
 public:
  explicit Histogram(const BinnedMatrix& binned);
  void build(const BinnedMatrix& binned, std::span<const double> grad, std::span<const double> hess,
             std::span<const std::uint32_t> rows);
  void subtract_from(const Histogram& parent);  // this = parent - this

  std::span<const GradientPair> feature(std::size_t f) const {
    return {cells_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<GradientPair> cells_;
};

struct SplitParams {
  double lambda = 1.0;
  std::int64_t min_samples_leaf = 20;
  double min_hessian = 1e-3;
  double min_gain = 0.0;
};

struct SplitCandidate {
  int feature = -1;
  std::size_t bin = 0;  // rows with bin <= this go left
  double threshold = 0;
  bool missing_left = false;
  double gain = -std::numeric_limits<double>::infinity();
  GradientPair left;
  GradientPair right;

  bool valid() const { return feature >= 0; }
};

// Newton split gain 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)].
inline double split_gain(const GradientPair& left, const GradientPair& right, double lambda) {
  const double g = left.g + right.g;
  const double h = left.h + right.h;
  return 0.5 * (left.g * left.g / (left.h + lambda) + right.g * right.g / (right.h + lambda) - g * g / (h + lambda));
}

inline double leaf_weight(const GradientPair& s, double lambda) { return -s.g / (s.h + lambda); }

// Scans features in order and thresholds ascending; for each threshold the
// missing-right routing is tried before missing-left. Only strictly better
// candidates replace the incumbent, and gain must exceed min_gain. When the
// node has no missing values the missing direction follows the heavier child.
SplitCandidate find_best_split(const BinnedMatrix& binned, const Histogram& hist, const GradientPair& total,
                               const SplitParams& params, std::span<const std::uint32_t> features);

// Convenience overload that builds the histogram over `rows` and scans all features.
SplitCandidate find_best_split(const BinnedMatrix& binned, std::span<const double> grad,
                               std::span<const double> hess, std::span<const std::uint32_t> rows,
                               const SplitParams& params);

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0;
  bool missing_left = false;
  int left = -1;
  int right = -1;
  double value = 0;  // leaf output (already scaled by the caller's shrinkage)
  double gain = 0;
  std::int64_t count = 0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  std::size_t leaf_count() const;
};

struct TreeParams {
  SplitParams split;
  int max_leaves = 31;
  int max_depth = -1;          // unlimited when negative
  int features_per_node = 0;   // 0 = all features, otherwise sampled per node
  double shrinkage = 1.0;      // multiplies leaf values
};

// Best-first (leaf-wise) growth: repeatedly splits the leaf with the largest
// gain until max_leaves is reached or no leaf has an admissible split.
// `rows` may repeat indices (bootstrap samples).
Tree grow_tree(const BinnedMatrix& binned, std::span<const double> grad, std::span<const double> hess,
               std::vector<std::uint32_t> rows, const TreeParams& params, std::mt19937_64* rng = nullptr);

}  // namespace cqa
