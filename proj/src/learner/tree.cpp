#include "cqa/learner/tree.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "cqa/error.hpp"

namespace cqa {

BinnedMatrix::BinnedMatrix(const Matrix& x, int max_bins) : rows_(x.rows()) {
  if (max_bins < 2 || max_bins > 65535) throw UsageError("n_bins must be in [2, 65535]");
  const std::size_t d = x.cols();
  upper_.resize(d);
  bins_.resize(d * rows_);
  std::vector<double> values;
  for (std::size_t f = 0; f < d; ++f) {
    values.clear();
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!is_missing(x(r, f))) values.push_back(x(r, f));
    }
    std::sort(values.begin(), values.end());
    auto& upper = upper_[f];
    std::unique_copy(values.begin(), values.end(), std::back_inserter(upper));
    if (upper.size() > static_cast<std::size_t>(max_bins)) {
      // Quantile cut points over the sample, deduplicated; the last bin is
      // closed by the maximum.
      std::vector<double> cuts;
      const std::size_t n = values.size();
      for (int b = 1; b < max_bins; ++b) {
        const std::size_t pos = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(max_bins);
        cuts.push_back(values[std::max<std::size_t>(pos, 1) - 1]);
      }
      cuts.push_back(values.back());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      upper = std::move(cuts);
    }
    const auto missing = static_cast<std::uint16_t>(upper.size());
    for (std::size_t r = 0; r < rows_; ++r) {
      const double v = x(r, f);
      bins_[f * rows_ + r] =
          is_missing(v) ? missing
                        : static_cast<std::uint16_t>(std::lower_bound(upper.begin(), upper.end(), v) - upper.begin());
    }
  }
}

Histogram::Histogram(const BinnedMatrix& binned) {
  offsets_.resize(binned.features() + 1, 0);
  for (std::size_t f = 0; f < binned.features(); ++f) offsets_[f + 1] = offsets_[f] + binned.value_bins(f) + 1;
  cells_.resize(offsets_.back());
}

void Histogram::build(const BinnedMatrix& binned, std::span<const double> grad, std::span<const double> hess,
                      std::span<const std::uint32_t> rows) {
  std::fill(cells_.begin(), cells_.end(), GradientPair{});
  for (std::size_t f = 0; f < binned.features(); ++f) {
    GradientPair* cell = cells_.data() + offsets_[f];
    for (const auto r : rows) {
      auto& c = cell[binned.bin(r, f)];
      c.g += grad[r];
      c.h += hess[r];
      ++c.n;
    }
  }
}

void Histogram::subtract_from(const Histogram& parent) {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    GradientPair p = parent.cells_[i];
    p -= cells_[i];
    cells_[i] = p;
  }
}

namespace {

bool admissible(const GradientPair& s, const SplitParams& p) { return s.n >= p.min_samples_leaf && s.h >= p.min_hessian; }

}  // namespace

SplitCandidate find_best_split(const BinnedMatrix& binned, const Histogram& hist, const GradientPair& total,
                               const SplitParams& params, std::span<const std::uint32_t> features) {
  SplitCandidate best;
  auto consider = [&](std::uint32_t f, std::size_t b, bool missing_left, const GradientPair& left) {
    GradientPair right = total;
    right -= left;
    if (!admissible(left, params) || !admissible(right, params)) return;
    const double gain = split_gain(left, right, params.lambda);
    if (!(gain > params.min_gain) || !(gain > best.gain)) return;
    best.feature = static_cast<int>(f);
    best.bin = b;
    best.threshold = binned.upper(f, b);
    best.missing_left = missing_left;
    best.gain = gain;
    best.left = left;
    best.right = right;
  };

  for (const auto f : features) {
    const auto cells = hist.feature(f);
    const std::size_t nb = binned.value_bins(f);
    const GradientPair& missing = cells[nb];
    GradientPair left;
    for (std::size_t b = 0; b < nb; ++b) {
      left += cells[b];
      if (missing.n == 0) {
        consider(f, b, false, left);
      } else {
        consider(f, b, false, left);
        GradientPair with_missing = left;
        with_missing += missing;
        consider(f, b, true, with_missing);
      }
    }
  }
  if (best.valid() && total.n > 0) {
    const auto& cells = hist.feature(static_cast<std::size_t>(best.feature));
    if (cells[binned.value_bins(static_cast<std::size_t>(best.feature))].n == 0) {
      best.missing_left = best.left.h >= best.right.h;
    }
  }
  return best;
}

SplitCandidate find_best_split(const BinnedMatrix& binned, std::span<const double> grad,
                               std::span<const double> hess, std::span<const std::uint32_t> rows,
                               const SplitParams& params) {
  Histogram hist(binned);
  hist.build(binned, grad, hess, rows);
  GradientPair total;
  for (const auto r : rows) total += GradientPair{grad[r], hess[r], 1};
  std::vector<std::uint32_t> features(binned.features());
  std::iota(features.begin(), features.end(), 0u);
  return find_best_split(binned, hist, total, params, features);
}

double Tree::predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    const double v = x[static_cast<std::size_t>(n.feature)];
    const bool go_left = is_missing(v) ? n.missing_left : v <= n.threshold;
    i = go_left ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct Leaf {
  int node = 0;
  int depth = 0;
  std::vector<std::uint32_t> rows;
  GradientPair total;
  std::unique_ptr<Histogram> hist;
  SplitCandidate split;
};

}  // namespace

Tree grow_tree(const BinnedMatrix& binned, std::span<const double> grad, std::span<const double> hess,
               std::vector<std::uint32_t> rows, const TreeParams& params, std::mt19937_64* rng) {
  const std::size_t d = binned.features();
  std::vector<std::uint32_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), 0u);
  const bool sample = params.features_per_node > 0 && static_cast<std::size_t>(params.features_per_node) < d;
  if (sample && rng == nullptr) throw UsageError("grow_tree: feature sampling needs a random generator");
  std::vector<std::uint32_t> scratch = all_features;

  auto choose_features = [&]() -> std::span<const std::uint32_t> {
    if (!sample) return all_features;
    // Partial Fisher-Yates; the chosen subset is scanned in ascending order.
    const auto m = static_cast<std::size_t>(params.features_per_node);
    std::iota(scratch.begin(), scratch.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(scratch[i], scratch[pick(*rng)]);
    }
    std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(m));
    return {scratch.data(), m};
  };
  auto can_split = [&](const Leaf& leaf) {
    return params.max_depth < 0 || leaf.depth < params.max_depth;
  };

  Tree tree;
  std::vector<Leaf> leaves;
  {
    Leaf root;
    root.rows = std::move(rows);
    for (const auto r : root.rows) root.total += GradientPair{grad[r], hess[r], 1};
    root.hist = std::make_unique<Histogram>(binned);
    root.hist->build(binned, grad, hess, root.rows);
    if (can_split(root)) root.split = find_best_split(binned, *root.hist, root.total, params.split, choose_features());
    tree.nodes.push_back({});
    tree.nodes.back().count = root.total.n;
    leaves.push_back(std::move(root));
  }

  std::size_t leaf_total = 1;
  while (params.max_leaves <= 0 || leaf_total < static_cast<std::size_t>(params.max_leaves)) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].split.valid()) continue;
      if (pick == leaves.size() || leaves[i].split.gain > leaves[pick].split.gain) pick = i;
    }
    if (pick == leaves.size()) break;

    Leaf parent = std::move(leaves[pick]);
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    const auto& s = parent.split;
    const auto f = static_cast<std::size_t>(s.feature);
    const auto missing = binned.missing_bin(f);

    Leaf left, right;
    left.depth = right.depth = parent.depth + 1;
    for (const auto r : parent.rows) {
      const auto b = binned.bin(r, f);
      const bool go_left = b == missing ? s.missing_left : b <= s.bin;
      (go_left ? left : right).rows.push_back(r);
    }
    left.total = s.left;
    right.total = s.right;
    parent.rows.clear();
    parent.rows.shrink_to_fit();

    // Build the smaller child directly and derive the other by subtraction.
    Leaf& small = left.rows.size() <= right.rows.size() ? left : right;
    Leaf& large = &small == &left ? right : left;
    small.hist = std::make_unique<Histogram>(binned);
    small.hist->build(binned, grad, hess, small.rows);
    large.hist = std::make_unique<Histogram>(binned);
    *large.hist = *small.hist;
    large.hist->subtract_from(*parent.hist);
    parent.hist.reset();

    left.node = static_cast<int>(tree.nodes.size());
    right.node = left.node + 1;
    auto& node = tree.nodes[static_cast<std::size_t>(parent.node)];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.missing_left = s.missing_left;
    node.gain = s.gain;
    node.left = left.node;
    node.right = right.node;
    tree.nodes.push_back({});
    tree.nodes.back().count = left.total.n;
    tree.nodes.push_back({});
    tree.nodes.back().count = right.total.n;

    if (can_split(left)) left.split = find_best_split(binned, *left.hist, left.total, params.split, choose_features());
    if (can_split(right)) right.split = find_best_split(binned, *right.hist, right.total, params.split, choose_features());
    leaves.push_back(std::move(left));
    leaves.push_back(std::move(right));
    ++leaf_total;
  }

  for (const auto& leaf : leaves) {
    tree.nodes[static_cast<std::size_t>(leaf.node)].value = params.shrinkage * leaf_weight(leaf.total, params.split.lambda);
  }
  return tree;
}

}  // namespace cqa
