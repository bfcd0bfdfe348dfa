#include "planted_topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace cqa::test {

PlantedCorpus make_planted_corpus(const PlantedSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<std::string>> docs;
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(spec.topics));
  for (auto& w : weights) {
    for (int i = 0; i < spec.words_per_topic; ++i) w.push_back(1.0 / (i + 2));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= sum;
  }
  PlantedCorpus out;
  std::gamma_distribution<double> gamma(spec.doc_alpha, 1.0);
  for (int d = 0; d < spec.documents; ++d) {
    std::vector<double> theta(static_cast<std::size_t>(spec.topics));
    for (auto& t : theta) t = gamma(rng) + 1e-12;
    out.dominant_topic.push_back(static_cast<int>(std::max_element(theta.begin(), theta.end()) - theta.begin()));
    std::discrete_distribution<int> pick_topic(theta.begin(), theta.end());
    std::vector<std::string> doc;
    for (int n = 0; n < spec.document_length; ++n) {
      const int k = pick_topic(rng);
      const auto& w = weights[static_cast<std::size_t>(k)];
      std::discrete_distribution<int> pick_word(w.begin(), w.end());
      doc.push_back("t" + std::to_string(k) + "w" + std::to_string(pick_word(rng)));
    }
    docs.push_back(std::move(doc));
  }
  out.corpus = build_lda_corpus(docs, {}, 1);
  const auto& vocab = out.corpus.vocabulary;
  out.topic_word.assign(static_cast<std::size_t>(spec.topics), std::vector<double>(vocab.size(), 0.0));
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    const auto& word = vocab[id];
    const auto wpos = word.find('w');
    const int k = std::stoi(word.substr(1, wpos - 1));
    const int i = std::stoi(word.substr(wpos + 1));
    out.topic_word[static_cast<std::size_t>(k)][id] = weights[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  // Words never sampled are absent from the vocabulary; renormalise.
  for (auto& row : out.topic_word) {
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& x : row) x /= sum;
  }
  return out;
}

double planted_topic_distance(const TopicModel& model, const PlantedCorpus& planted) {
  const auto k = planted.topic_word.size();
  const auto v = planted.corpus.vocabulary.size();
  std::vector<std::vector<double>> tv(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double d = 0;
      for (std::uint32_t w = 0; w < v; ++w) {
        d += std::abs(model.word_probability(static_cast<int>(a), w) - planted.topic_word[b][w]);
      }
      tv[a][b] = d / 2;
    }
  }
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0;
    for (std::size_t a = 0; a < k; ++a) s += tv[a][perm[a]];
    best = std::min(best, s / static_cast<double>(k));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<std::uint32_t> planted_words(const PlantedCorpus& planted, int topic) {
  std::vector<std::uint32_t> ids;
  const auto& row = planted.topic_word[static_cast<std::size_t>(topic)];
  for (std::uint32_t w = 0; w < row.size(); ++w) {
    if (row[w] > 0) ids.push_back(w);
  }
  return ids;
}

}  // namespace cqa::test
