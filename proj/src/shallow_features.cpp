#include "cqa/shallow_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cqa/error.hpp"
#include "cqa/html.hpp"
#include "cqa/text.hpp"

namespace cqa {

void VocabularyModel::add(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) ++counts[t];
  total += static_cast<std::int64_t>(tokens.size());
}

double VocabularyModel::probability(std::string_view word) const {
  const auto it = counts.find(std::string(word));
  const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
  return (c + 1.0) / (static_cast<double>(total) + static_cast<double>(unique()) + 1.0);
}

VocabularyModel build_thread_vocabulary(const Thread& thread) {
  VocabularyModel vocab;
  vocab.add(tokenize(thread.question.body_text));
  for (const auto& c : thread.comments_on_question) vocab.add(tokenize(c.text));
  for (const auto& a : thread.answers) {
    vocab.add(tokenize(a.body_text));
    for (const auto& c : thread.comments_for(a.post_id)) vocab.add(tokenize(c.text));
  }
  return vocab;
}

double normalized_log_likelihood(const std::vector<std::string>& answer_tokens,
                                 const std::function<double(std::string_view)>& probability) {
  if (answer_tokens.empty()) return 0.0;
  std::map<std::string_view, int> in_answer;
  for (const auto& t : answer_tokens) ++in_answer[t];
  double sum = 0.0;
  for (const auto& [word, count] : in_answer) sum += count * std::log(probability(word));
  return sum / static_cast<double>(in_answer.size());
}

double normalized_log_likelihood(std::string_view answer_text, const VocabularyModel& vocab) {
  return normalized_log_likelihood(tokenize(answer_text), [&](std::string_view w) { return vocab.probability(w); });
}

TagCounts html_tag_features(std::string_view answer_html, std::string_view question_text) {
  TagCounts counts;
  const auto tags = scan_tags(answer_html);
  const std::string question = normalize_whitespace(question_text);
  int quote_depth = 0;
  int strong_depth = 0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto& tag = tags[i];
    if (tag.name == "strong" || tag.name == "b") {
      if (tag.closing) {
        --strong_depth;
      } else if (!tag.self_closing) {
        ++strong_depth;
        ++counts.strong;
      }
      continue;
    }
    if (tag.name != "blockquote") continue;
    if (tag.closing) {
      --quote_depth;
      continue;
    }
    ++quote_depth;
    ++counts.quote;
    // Inner text runs to the matching close tag, or to the end if unmatched.
    std::size_t inner_end = answer_html.size();
    int depth = 1;
    for (std::size_t j = i + 1; j < tags.size(); ++j) {
      if (tags[j].name != "blockquote") continue;
      depth += tags[j].closing ? -1 : 1;
      if (depth == 0) {
        inner_end = tags[j].begin;
        break;
      }
    }
    const auto inner = strip_html(answer_html.substr(tag.end, inner_end - tag.end));
    if (!inner.empty() && question.find(inner) != std::string::npos) ++counts.contains;
  }
  counts.unbalanced = quote_depth != 0 || strong_depth != 0;
  return counts;
}

bool contains_hyperlink(std::string_view html, std::string_view text) {
  for (const auto& tag : scan_tags(html)) {
    if (tag.name == "a" && !tag.closing && tag.attributes.find("href") != std::string_view::npos) return true;
  }
  return text.find("http://") != std::string_view::npos || text.find("https://") != std::string_view::npos;
}

std::array<double, ShallowFeatures::kCount> ShallowFeatures::values() const {
  return {age_seconds,         rating_score,           length_chars,   word_count,     sentence_count,
          longest_sentence_chars, awps,                avg_chars_per_word, contains_hyperlink, answer_count_in_thread,
          ll_n,                flesch_kincaid,         quote_count,    contains_count, strong_count};
}

std::vector<ShallowFeatures> extract_shallow(const Thread& thread) {
  const auto vocab = build_thread_vocabulary(thread);
  std::vector<ShallowFeatures> rows;
  rows.reserve(thread.answers.size());
  for (const auto& answer : thread.answers) {
    ShallowFeatures f;
    f.age_seconds = static_cast<double>(answer.creation_time - thread.question.creation_time) / 1000.0;
    f.rating_score = static_cast<double>(answer.score);
    f.length_chars = static_cast<double>(utf8_length(answer.body_text));

    const auto words = tokenize(answer.body_text);
    f.word_count = static_cast<double>(words.size());
    std::size_t sentences = 0;
    std::size_t longest = 0;
    for (const auto& s : split_sentences(answer.body_text)) {
      if (tokenize(s).empty()) continue;
      ++sentences;
      longest = std::max(longest, utf8_length(s));
    }
    f.sentence_count = static_cast<double>(sentences);
    f.longest_sentence_chars = static_cast<double>(longest);
    std::size_t chars = 0;
    std::size_t syllables = 0;
    for (const auto& w : words) {
      chars += utf8_length(w);
      syllables += static_cast<std::size_t>(count_syllables(w));
    }
    if (!words.empty()) {
      f.awps = f.word_count / f.sentence_count;
      f.avg_chars_per_word = static_cast<double>(chars) / f.word_count;
      f.flesch_kincaid = flesch_kincaid(f.awps, static_cast<double>(syllables) / f.word_count);
    }
    f.contains_hyperlink = contains_hyperlink(answer.body_html, answer.body_text) ? 1.0 : 0.0;
    f.answer_count_in_thread = static_cast<double>(thread.answers.size());
    f.ll_n = normalized_log_likelihood(words, [&](std::string_view w) { return vocab.probability(w); });

    const auto tags = html_tag_features(answer.body_html, thread.question.body_text);
    f.quote_count = tags.quote;
    f.contains_count = tags.contains;
    f.strong_count = tags.strong;
    rows.push_back(f);
  }
  return rows;
}

std::vector<double> rank_within_thread(std::span<const double> values, RankDirection direction) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i])) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == RankDirection::higher_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(values.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const bool tied = pos > 0 && values[order[pos]] == values[order[pos - 1]];
    ranks[order[pos]] = tied ? ranks[order[pos - 1]] : static_cast<double>(pos + 1);
  }
  return ranks;
}

std::vector<double> percent_rank(std::span<const double> ranks, std::size_t n_answers) {
  if (n_answers == 0) throw UsageError("percent_rank: n_answers must be >= 1");
  std::vector<double> out(ranks.size());
  std::transform(ranks.begin(), ranks.end(), out.begin(),
                 [&](double r) { return r / static_cast<double>(n_answers); });
  return out;
}

}  // namespace cqa
