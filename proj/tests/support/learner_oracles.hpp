#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqa/corpus.hpp"
#include "cqa/learner/matrix.hpp"
#include "cqa/learner/tree.hpp"

namespace cqa::test {

// P(s+ > s-) + 1/2 P(s+ = s-) by enumerating every positive/negative pair.
double brute_force_auc(std::span<const double> scores, std::span<const int> labels);

struct ExactSplit {
  int feature = -1;
  double gain = 0;
  std::vector<std::uint32_t> left;  // sorted row ids sent left
};

// Exhaustive greedy split over raw values: every feature, every distinct
// threshold, missing rows sent either way. Same admissibility rules as the
// histogram finder (min_samples_leaf, min_hessian, gain > min_gain).
ExactSplit exact_best_split(const Matrix& x, std::span<const double> grad, std::span<const double> hess,
                            std::span<const std::uint32_t> rows, const SplitParams& params);

// label = 1 iff column 0 > 0; the other columns are noise, some missing.
struct Labelled {
  Matrix x;
  std::vector<int> y;
  std::vector<Id> groups;  // every 4 consecutive rows form one question
};
Labelled separable_dataset(std::size_t n, std::size_t noise_features, std::uint64_t seed);

}  // namespace cqa::test
