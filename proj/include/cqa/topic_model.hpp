#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cqa/artifact.hpp"

namespace cqa {

using Document = std::vector<std::uint32_t>;  // word ids

struct LdaCorpus {
  std::vector<std::string> vocabulary;  // id -> word, sorted
  std::vector<Document> documents;

  std::size_t token_count() const;
};

// English stop words used to filter LDA input (the list lives in stopwords.cpp).
const std::unordered_set<std::string>& default_stopwords();
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

// Drops stop words and words that occur in fewer than `min_document_frequency`
// documents, then assigns ids in lexicographic order.
LdaCorpus build_lda_corpus(const std::vector<std::vector<std::string>>& token_docs,
                           const std::unordered_set<std::string>& stopwords, int min_document_frequency = 2);

struct LdaConfig {
  int topics = 10;
  double alpha = 0.0;  // <= 0 means 50 / topics
  double beta = 0.01;
  int train_iterations = 500;
  int infer_iterations = 100;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }
};

class TopicModel {
 public:
  TopicModel() = default;
  TopicModel(int topics, double alpha, double beta, std::vector<std::string> vocabulary);

  int topics() const { return topics_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  std::int64_t topic_word(int topic, std::uint32_t word) const { return counts_[index(topic, word)]; }
  std::int64_t topic_total(int topic) const { return totals_[static_cast<std::size_t>(topic)]; }
  std::span<const std::int64_t> topic_totals() const { return totals_; }

  // Smoothed p(word | topic).
  double word_probability(int topic, std::uint32_t word) const;
  // Word ids of a topic sorted by probability, descending (ties by id).
  std::vector<std::uint32_t> top_words(int topic, std::size_t n) const;

  // Maps tokens to ids, dropping words outside the vocabulary.
  Document encode(const std::vector<std::string>& tokens) const;

  std::uint64_t seed = 0;
  int iterations = 0;

  void save(const std::filesystem::path& path, const Manifest& manifest) const;
  static TopicModel load(const std::filesystem::path& path);

  bool operator==(const TopicModel& other) const;

 private:
  friend TopicModel train_lda(const LdaCorpus&, const LdaConfig&,
                              const std::function<void(int, const TopicModel&)>&);
  std::size_t index(int topic, std::uint32_t word) const {
    return static_cast<std::size_t>(topic) * vocabulary_.size() + word;
  }
  void rebuild_index();

  int topics_ = 0;
  double alpha_ = 0;
  double beta_ = 0;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::uint32_t> word_ids_;
  std::vector<std::int64_t> counts_;  // topics x vocabulary
  std::vector<std::int64_t> totals_;
};

// Collapsed Gibbs sampler. `on_sweep(sweep, model)` sees the counts after each
// full sweep. Deterministic for a given seed.
TopicModel train_lda(const LdaCorpus& corpus, const LdaConfig& config,
                     const std::function<void(int, const TopicModel&)>& on_sweep = {});

struct Coherence {
  std::vector<double> per_topic;
  double mean = 0;
};

// UMass coherence over the `top_n` most probable words of each topic, using
// document (co-)occurrence counts from `corpus`.
Coherence coherence(const TopicModel& model, const LdaCorpus& corpus, std::size_t top_n = 10);

struct TopicCountSelection {
  int best_topics = 0;
  std::vector<std::pair<int, Coherence>> table;  // one row per grid entry, grid order
  TopicModel best_model;
};

// Trains one model per grid entry and keeps the highest mean coherence
// (ties go to the smaller topic count).
TopicCountSelection select_topic_count(const LdaCorpus& corpus, std::span<const int> grid, const LdaConfig& base,
                                       std::size_t top_n = 10);

using TopicDistribution = std::vector<double>;

// Gibbs-samples topic assignments for one document with topic-word counts
// held fixed; averages theta over the last quarter of sweeps. Empty documents
// get the uniform distribution.
TopicDistribution infer(const TopicModel& model, const Document& doc, int iterations, std::uint64_t seed);

}  // namespace cqa
