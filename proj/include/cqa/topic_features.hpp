#pragma once

#include <array>
#include <span>
#include <string_view>

namespace cqa {

// Divergences between topic distributions (natural log). Inputs must have
// equal length; kl/jsd additionally expect strictly positive entries.
double kl(std::span<const double> p, std::span<const double> q);
double jsd(std::span<const double> p, std::span<const double> q);
double cosine(std::span<const double> p, std::span<const double> q);

// Coefficient of determination of `answer` against `question`, with the
// question's mean fixed at 1/K. A degenerate (uniform) question yields 1 when
// the residual is also ~0 and kR2Floor otherwise.
double r2(std::span<const double> question, std::span<const double> answer);
inline constexpr double kR2Floor = -10.0;

struct TextualFeatures {
  static constexpr std::array<std::string_view, 5> kNames{"kl_q_a", "kl_a_q", "jsd", "r2", "cosine"};

  double kl_q_a = 0;
  double kl_a_q = 0;
  double jsd = 0;
  double r2 = 0;
  double cosine = 0;

  std::array<double, 5> values() const { return {kl_q_a, kl_a_q, jsd, r2, cosine}; }
};

TextualFeatures extract_textual(std::span<const double> question, std::span<const double> answer);

}  // namespace cqa
