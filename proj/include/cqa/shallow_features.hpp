#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cqa/corpus.hpp"

namespace cqa {

// Word counts over one thread (question, answers and every comment). Word
// probabilities are add-one smoothed with one extra slot for unseen words:
//   P(w) = (count(w) + 1) / (total + unique + 1)
struct VocabularyModel {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total = 0;

  void add(const std::vector<std::string>& tokens);
  std::size_t unique() const { return counts.size(); }
  double probability(std::string_view word) const;
};

VocabularyModel build_thread_vocabulary(const Thread& thread);

// Grade level from average words per sentence and syllables per word.
constexpr double flesch_kincaid(double awps, double asps) { return 0.39 * awps + 11.8 * asps - 15.59; }

// (1/U) * sum_w C(w) ln P(w) over the whole answer, U = unique words in it.
// Zero for an empty answer.
double normalized_log_likelihood(const std::vector<std::string>& answer_tokens,
                                 const std::function<double(std::string_view)>& probability);
double normalized_log_likelihood(std::string_view answer_text, const VocabularyModel& vocab);

struct TagCounts {
  int quote = 0;     // <blockquote> elements
  int contains = 0;  // blockquotes whose text occurs in the question
  int strong = 0;    // <strong> and <b> elements
  bool unbalanced = false;
};

TagCounts html_tag_features(std::string_view answer_html, std::string_view question_text);

// True when the HTML has an <a href=...> or the text has a bare http(s) URL.
bool contains_hyperlink(std::string_view html, std::string_view text);

struct ShallowFeatures {
  static constexpr std::size_t kCount = 15;
  static constexpr std::array<std::string_view, kCount> kNames{
      "age",          "rating_score",   "length",       "word_count",        "sentence_count",
      "longest_sentence", "awps",       "avg_chars_per_word", "contains_hyperlink", "answer_count",
      "ll_n",         "flesch_kincaid", "quote",        "contains",          "strong"};

  double age_seconds = 0;
  double rating_score = 0;
  double length_chars = 0;
  double word_count = 0;
  double sentence_count = 0;
  double longest_sentence_chars = 0;
  double awps = 0;
  double avg_chars_per_word = 0;
  double contains_hyperlink = 0;
  double answer_count_in_thread = 0;
  double ll_n = 0;
  double flesch_kincaid = 0;
  double quote_count = 0;
  double contains_count = 0;
  double strong_count = 0;

  std::array<double, kCount> values() const;
};

// One row per answer, in thread order.
std::vector<ShallowFeatures> extract_shallow(const Thread& thread);

enum class RankDirection { higher_better, lower_better };

// Rank 1 is best; tied values share the smallest rank of their block. NaN
// (missing) values get a NaN rank and do not occupy a rank.
std::vector<double> rank_within_thread(std::span<const double> values, RankDirection direction);

// rank / n_answers; NaN stays NaN.
std::vector<double> percent_rank(std::span<const double> ranks, std::size_t n_answers);

}  // namespace cqa
