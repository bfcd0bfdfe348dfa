#include "cqa/topic_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cqa/error.hpp"

namespace cqa {

namespace {

void check_lengths(std::span<const double> p, std::span<const double> q, const char* what) {
  if (p.size() != q.size()) throw UsageError(std::string(what) + ": length mismatch");
}

}  // namespace

double kl(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q, "kl");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum < 0.0 ? 0.0 : sum;  // rounding can dip just below zero for p ~= q
}

double jsd(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q, "jsd");
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

double cosine(std::span<const double> p, std::span<const double> q) {
  check_lengths(p, q, "cosine");
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    np += p[i] * p[i];
    nq += q[i] * q[i];
  }
  if (np == 0.0 || nq == 0.0) return 0.0;
  return std::min(1.0, dot / (std::sqrt(np) * std::sqrt(nq)));
}

double r2(std::span<const double> question, std::span<const double> answer) {
  check_lengths(question, answer, "r2");
  if (question.empty()) throw UsageError("r2: empty distributions");
  const double mean = 1.0 / static_cast<double>(question.size());
  double residual = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < question.size(); ++i) {
    residual += (answer[i] - question[i]) * (answer[i] - question[i]);
    spread += (question[i] - mean) * (question[i] - mean);
  }
  if (spread < 1e-12) return residual < 1e-12 ? 1.0 : kR2Floor;
  return 1.0 - residual / spread;
}

TextualFeatures extract_textual(std::span<const double> question, std::span<const double> answer) {
  TextualFeatures f;
  f.kl_q_a = kl(question, answer);
  f.kl_a_q = kl(answer, question);
  f.jsd = jsd(question, answer);
  f.r2 = r2(question, answer);
  f.cosine = cosine(question, answer);
  return f;
}

}  // namespace cqa
