#include "cqa/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "cqa/error.hpp"

namespace cqa {

std::size_t LdaCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream fields(line);
    std::string w;
    while (fields >> w) words.insert(w);
  }
  return words;
}

LdaCorpus build_lda_corpus(const std::vector<std::vector<std::string>>& token_docs,
                           const std::unordered_set<std::string>& stopwords, int min_document_frequency) {
  std::unordered_map<std::string, int> df;
  for (const auto& doc : token_docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : doc) {
      if (!stopwords.contains(t) && seen.insert(t).second) ++df[t];
    }
  }
  LdaCorpus corpus;
  for (const auto& [word, n] : df) {
    if (n >= min_document_frequency) corpus.vocabulary.push_back(word);
  }
  std::sort(corpus.vocabulary.begin(), corpus.vocabulary.end());
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < corpus.vocabulary.size(); ++i) ids.emplace(corpus.vocabulary[i], i);
  corpus.documents.reserve(token_docs.size());
  for (const auto& doc : token_docs) {
    Document d;
    for (const auto& t : doc) {
      if (const auto it = ids.find(t); it != ids.end()) d.push_back(it->second);
    }
    corpus.documents.push_back(std::move(d));
  }
  return corpus;
}

TopicModel::TopicModel(int topics, double alpha, double beta, std::vector<std::string> vocabulary)
    : topics_(topics),
      alpha_(alpha),
      beta_(beta),
      vocabulary_(std::move(vocabulary)),
      counts_(static_cast<std::size_t>(topics) * vocabulary_.size(), 0),
      totals_(static_cast<std::size_t>(topics), 0) {
  rebuild_index();
}

void TopicModel::rebuild_index() {
  word_ids_.clear();
  for (std::uint32_t i = 0; i < vocabulary_.size(); ++i) word_ids_.emplace(vocabulary_[i], i);
}

double TopicModel::word_probability(int topic, std::uint32_t word) const {
  const double v = static_cast<double>(vocabulary_.size());
  return (static_cast<double>(topic_word(topic, word)) + beta_) /
         (static_cast<double>(topic_total(topic)) + v * beta_);
}

std::vector<std::uint32_t> TopicModel::top_words(int topic, std::size_t n) const {
  std::vector<std::uint32_t> ids(vocabulary_.size());
  std::iota(ids.begin(), ids.end(), 0u);
  n = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      const auto ca = topic_word(topic, a);
                      const auto cb = topic_word(topic, b);
                      return ca != cb ? ca > cb : a < b;
                    });
  ids.resize(n);
  return ids;
}

Document TopicModel::encode(const std::vector<std::string>& tokens) const {
  Document d;
  for (const auto& t : tokens) {
    if (const auto it = word_ids_.find(t); it != word_ids_.end()) d.push_back(it->second);
  }
  return d;
}

bool TopicModel::operator==(const TopicModel& o) const {
  return topics_ == o.topics_ && alpha_ == o.alpha_ && beta_ == o.beta_ && vocabulary_ == o.vocabulary_ &&
         counts_ == o.counts_ && totals_ == o.totals_ && seed == o.seed && iterations == o.iterations;
}

void TopicModel::save(const std::filesystem::path& path, const Manifest& manifest) const {
  auto out = open_output(path);
  write_manifest_line(out, manifest);
  out.precision(17);
  out << "cqa-lda 1\n"
      << topics_ << ' ' << alpha_ << ' ' << beta_ << ' ' << seed << ' ' << iterations << '\n'
      << vocabulary_.size() << '\n';
  for (const auto& w : vocabulary_) out << w << '\n';
  for (int k = 0; k < topics_; ++k) {
    // Sparse row: "<nonzero count> id:count ..."
    std::size_t nnz = 0;
    for (std::uint32_t w = 0; w < vocabulary_.size(); ++w) nnz += topic_word(k, w) != 0;
    out << nnz;
    for (std::uint32_t w = 0; w < vocabulary_.size(); ++w) {
      if (const auto c = topic_word(k, w); c != 0) out << ' ' << w << ':' << c;
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

TopicModel TopicModel::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  auto fail = [&](const std::string& what) { return DataError(path.string() + ": " + what); };
  if (!next_data_line(in, line) || line != "cqa-lda 1") throw fail("not a topic model file");
  TopicModel m;
  std::size_t v = 0;
  if (!(in >> m.topics_ >> m.alpha_ >> m.beta_ >> m.seed >> m.iterations >> v) || m.topics_ < 1) {
    throw fail("bad header");
  }
  m.vocabulary_.resize(v);
  for (auto& w : m.vocabulary_) {
    if (!(in >> w)) throw fail("truncated vocabulary");
  }
  m.counts_.assign(static_cast<std::size_t>(m.topics_) * v, 0);
  m.totals_.assign(static_cast<std::size_t>(m.topics_), 0);
  for (int k = 0; k < m.topics_; ++k) {
    std::size_t nnz = 0;
    if (!(in >> nnz)) throw fail("truncated topic rows");
    for (std::size_t i = 0; i < nnz; ++i) {
      std::uint32_t w = 0;
      char colon = 0;
      std::int64_t c = 0;
      if (!(in >> w >> colon >> c) || colon != ':' || w >= v) throw fail("bad topic row");
      m.counts_[m.index(k, w)] = c;
      m.totals_[static_cast<std::size_t>(k)] += c;
    }
  }
  m.rebuild_index();
  return m;
}

TopicModel train_lda(const LdaCorpus& corpus, const LdaConfig& config,
                     const std::function<void(int, const TopicModel&)>& on_sweep) {
  const int k_topics = config.topics;
  if (k_topics < 2) throw UsageError("train_lda: need at least 2 topics");
  if (config.beta <= 0.0) throw UsageError("train_lda: beta must be positive");
  const std::size_t tokens = corpus.token_count();
  if (tokens == 0) throw UsageError("train_lda: empty corpus");
  if (static_cast<std::size_t>(k_topics) > tokens) throw UsageError("train_lda: more topics than tokens");

  const double alpha = config.effective_alpha();
  const double beta = config.beta;
  TopicModel model(k_topics, alpha, beta, corpus.vocabulary);
  model.seed = config.seed;
  model.iterations = config.train_iterations;
  const double v_beta = static_cast<double>(corpus.vocabulary.size()) * beta;
  const auto K = static_cast<std::size_t>(k_topics);

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> pick_topic(0, k_topics - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<int>> assignment(corpus.documents.size());
  std::vector<std::int64_t> doc_topic(corpus.documents.size() * K, 0);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    assignment[d].resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int z = pick_topic(rng);
      assignment[d][i] = z;
      ++doc_topic[d * K + static_cast<std::size_t>(z)];
      ++model.counts_[model.index(z, doc[i])];
      ++model.totals_[static_cast<std::size_t>(z)];
    }
  }

  std::vector<double> cumulative(K);
  for (int sweep = 0; sweep < config.train_iterations; ++sweep) {
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      const auto& doc = corpus.documents[d];
      std::int64_t* dt = &doc_topic[d * K];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::uint32_t w = doc[i];
        int z = assignment[d][i];
        --dt[z];
        --model.counts_[model.index(z, w)];
        --model.totals_[static_cast<std::size_t>(z)];

        double sum = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          sum += (static_cast<double>(dt[t]) + alpha) *
                 (static_cast<double>(model.counts_[t * corpus.vocabulary.size() + w]) + beta) /
                 (static_cast<double>(model.totals_[t]) + v_beta);
          cumulative[t] = sum;
        }
        const double u = unit(rng) * sum;
        z = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (z >= k_topics) z = k_topics - 1;

        assignment[d][i] = z;
        ++dt[z];
        ++model.counts_[model.index(z, w)];
        ++model.totals_[static_cast<std::size_t>(z)];
      }
    }
    if (on_sweep) on_sweep(sweep, model);
  }
  return model;
}

Coherence coherence(const TopicModel& model, const LdaCorpus& corpus, std::size_t top_n) {
  if (top_n < 2) throw UsageError("coherence: top_n must be >= 2");
  // Document sets for every word that is a top word of some topic.
  std::vector<std::vector<std::uint32_t>> tops(static_cast<std::size_t>(model.topics()));
  std::map<std::uint32_t, std::vector<std::uint32_t>> docs_with;
  for (int k = 0; k < model.topics(); ++k) {
    tops[static_cast<std::size_t>(k)] = model.top_words(k, top_n);
    for (auto w : tops[static_cast<std::size_t>(k)]) docs_with[w];
  }
  for (std::uint32_t d = 0; d < corpus.documents.size(); ++d) {
    for (auto w : corpus.documents[d]) {
      auto it = docs_with.find(w);
      if (it != docs_with.end() && (it->second.empty() || it->second.back() != d)) it->second.push_back(d);
    }
  }
  auto co_occurrence = [&](std::uint32_t a, std::uint32_t b) {
    const auto& da = docs_with[a];
    const auto& db = docs_with[b];
    std::size_t i = 0, j = 0, n = 0;
    while (i < da.size() && j < db.size()) {
      if (da[i] < db[j]) {
        ++i;
      } else if (db[j] < da[i]) {
        ++j;
      } else {
        ++n, ++i, ++j;
      }
    }
    return static_cast<double>(n);
  };

  Coherence result;
  for (const auto& words : tops) {
    double score = 0.0;
    for (std::size_t m = 1; m < words.size(); ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        // Words are ordered by probability; the more probable word conditions.
        const double d_l = static_cast<double>(docs_with[words[l]].size());
        if (d_l == 0.0) continue;  // only possible for words the model never assigned
        score += std::log((co_occurrence(words[m], words[l]) + 1.0) / d_l);
      }
    }
    result.per_topic.push_back(score);
  }
  result.mean = std::accumulate(result.per_topic.begin(), result.per_topic.end(), 0.0) /
                static_cast<double>(result.per_topic.size());
  return result;
}

TopicCountSelection select_topic_count(const LdaCorpus& corpus, std::span<const int> grid, const LdaConfig& base,
                                       std::size_t top_n) {
  if (grid.empty()) throw UsageError("select_topic_count: empty grid");
  TopicCountSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (int k : grid) {
    LdaConfig cfg = base;
    cfg.topics = k;
    auto model = train_lda(corpus, cfg);
    auto c = coherence(model, corpus, top_n);
    const bool better = c.mean > best || (c.mean == best && k < sel.best_topics);
    if (better) {
      best = c.mean;
      sel.best_topics = k;
      sel.best_model = std::move(model);
    }
    sel.table.emplace_back(k, std::move(c));
  }
  return sel;
}

TopicDistribution infer(const TopicModel& model, const Document& doc, int iterations, std::uint64_t seed) {
  const int k_topics = model.topics();
  const auto K = static_cast<std::size_t>(k_topics);
  if (doc.empty() || iterations < 1) return TopicDistribution(K, 1.0 / static_cast<double>(K));

  const double alpha = model.alpha();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_topic(0, k_topics - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // phi is fixed during inference.
  std::vector<double> phi(K * doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    for (std::size_t t = 0; t < K; ++t) phi[i * K + t] = model.word_probability(static_cast<int>(t), doc[i]);
  }
  std::vector<int> z(doc.size());
  std::vector<std::int64_t> dt(K, 0);
  for (auto& zi : z) {
    zi = pick_topic(rng);
    ++dt[static_cast<std::size_t>(zi)];
  }

  const int burn_in = iterations - std::max(1, iterations / 4);
  const double denom = static_cast<double>(doc.size()) + static_cast<double>(K) * alpha;
  TopicDistribution theta(K, 0.0);
  int samples = 0;
  std::vector<double> cumulative(K);
  for (int sweep = 0; sweep < iterations; ++sweep) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      --dt[static_cast<std::size_t>(z[i])];
      double sum = 0.0;
      for (std::size_t t = 0; t < K; ++t) {
        sum += (static_cast<double>(dt[t]) + alpha) * phi[i * K + t];
        cumulative[t] = sum;
      }
      const double u = unit(rng) * sum;
      auto t = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (t >= K) t = K - 1;
      z[i] = static_cast<int>(t);
      ++dt[t];
    }
    if (sweep >= burn_in) {
      for (std::size_t t = 0; t < K; ++t) theta[t] += (static_cast<double>(dt[t]) + alpha) / denom;
      ++samples;
    }
  }
  double total = 0.0;
  for (auto& p : theta) {
    p /= samples;
    total += p;
  }
  for (auto& p : theta) p /= total;
  return theta;
}

}  // namespace cqa
