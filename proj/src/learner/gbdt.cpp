#include "cqa/learner/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqa/error.hpp"

namespace cqa {

void TrainConfig::validate() const {
  if (n_trees < 1) throw UsageError("n_trees must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw UsageError("learning_rate must be in (0, 1]");
  if (n_bins < 2 || n_bins > 65535) throw UsageError("n_bins must be in [2, 65535]");
  if (max_leaves < 2) throw UsageError("max_leaves must be >= 2");
  if (min_samples_leaf < 1) throw UsageError("min_samples_leaf must be >= 1");
  if (min_gain < 0.0) throw UsageError("min_gain must be >= 0");
  if (lambda < 0.0) throw UsageError("lambda must be >= 0");
  if (!(positive_weight > 0.0)) throw UsageError("positive_weight must be > 0");
}

nlohmann::ordered_json to_json(const TrainConfig& c) {
  return {{"n_trees", c.n_trees},   {"learning_rate", c.learning_rate},
          {"max_leaves", c.max_leaves}, {"min_samples_leaf", c.min_samples_leaf},
          {"min_gain", c.min_gain}, {"n_bins", c.n_bins},
          {"lambda", c.lambda},     {"seed", c.seed},
          {"positive_weight", c.positive_weight}};
}

TrainConfig train_config_from_json(const nlohmann::ordered_json& j, TrainConfig c) {
  c.n_trees = j.value("n_trees", c.n_trees);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_leaves = j.value("max_leaves", c.max_leaves);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  c.min_gain = j.value("min_gain", c.min_gain);
  c.n_bins = j.value("n_bins", c.n_bins);
  c.lambda = j.value("lambda", c.lambda);
  c.seed = j.value("seed", c.seed);
  c.positive_weight = j.value("positive_weight", c.positive_weight);
  return c;
}

double sigmoid(double margin) {
  if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

LogisticDerivatives logistic_derivatives(double margin, int label) {
  const double p = sigmoid(margin);
  return {p - label, p * (1.0 - p)};
}

double logistic_loss(double margin, int label) {
  // log(1 + e^m) - y m, computed without overflow.
  const double softplus = margin > 0 ? margin + std::log1p(std::exp(-margin)) : std::log1p(std::exp(margin));
  return softplus - label * margin;
}

void check_binary_labels(std::span<const int> y, std::size_t rows) {
  if (y.size() != rows) throw UsageError("label count does not match row count");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v == 0) {
      has0 = true;
    } else if (v == 1) {
      has1 = true;
    } else {
      throw DataError("labels must be 0 or 1");
    }
  }
  if (!has0 || !has1) throw DataError("degenerate labels: both classes are required");
}

double GbdtModel::margin(std::span<const double> x) const {
  double m = base_score;
  for (const auto& t : trees) m += t.predict(x);
  return m;
}

double GbdtModel::predict(std::span<const double> x) const {
  if (x.size() != arity()) {
    throw UsageError("predict: expected " + std::to_string(arity()) + " features, got " + std::to_string(x.size()));
  }
  return sigmoid(margin(x));
}

std::vector<double> GbdtModel::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

std::vector<FeatureImportance> GbdtModel::importance() const {
  std::vector<FeatureImportance> out;
  for (std::size_t f = 0; f < feature_names.size(); ++f) {
    const double avg = split_count[f] > 0 ? gain_sum[f] / static_cast<double>(split_count[f]) : 0.0;
    out.push_back({feature_names[f], avg, split_count[f]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.average_gain > b.average_gain; });
  return out;
}

GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const TrainConfig& config,
                     std::vector<std::string> feature_names, const std::function<void(int, double)>& on_iteration) {
  config.validate();
  check_binary_labels(y, x.rows());
  const std::size_t n = x.rows();
  if (feature_names.empty()) {
    for (std::size_t f = 0; f < x.cols(); ++f) feature_names.push_back("f" + std::to_string(f));
  }
  if (feature_names.size() != x.cols()) throw UsageError("feature name count does not match column count");

  std::vector<double> weight(n);
  double w_pos = 0, w_all = 0;
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = y[i] == 1 ? config.positive_weight : 1.0;
    w_pos += y[i] * weight[i];
    w_all += weight[i];
  }
  GbdtModel model;
  model.config = config;
  model.feature_names = std::move(feature_names);
  model.gain_sum.assign(x.cols(), 0.0);
  model.split_count.assign(x.cols(), 0);
  const double prior = w_pos / w_all;
  model.base_score = std::log(prior / (1.0 - prior));

  const BinnedMatrix binned(x, config.n_bins);
  TreeParams params;
  params.split.lambda = config.lambda;
  params.split.min_samples_leaf = config.min_samples_leaf;
  params.split.min_gain = config.min_gain;
  params.max_leaves = config.max_leaves;
  params.shrinkage = config.learning_rate;

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = logistic_derivatives(margin[i], y[i]);
      grad[i] = weight[i] * d.gradient;
      hess[i] = weight[i] * d.hessian;
    }
    auto tree = grow_tree(binned, grad, hess, rows, params);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      model.gain_sum[static_cast<std::size_t>(node.feature)] += node.gain;
      ++model.split_count[static_cast<std::size_t>(node.feature)];
    }
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += tree.predict(x.row(i));
      if (on_iteration) loss += weight[i] * logistic_loss(margin[i], y[i]);
    }
    model.trees.push_back(std::move(tree));
    if (on_iteration) on_iteration(t, loss / w_all);
  }
  return model;
}

void GbdtModel::save(const std::filesystem::path& path, const Manifest& manifest) const {
  auto out = open_output(path);
  write_manifest_line(out, manifest);
  out.precision(17);
  out << "cqa-gbdt 1\n"
      << "config " << to_json(config).dump() << '\n'
      << "base_score " << base_score << '\n'
      << "features " << feature_names.size() << '\n';
  for (std::size_t f = 0; f < feature_names.size(); ++f) {
    out << feature_names[f] << ' ' << gain_sum[f] << ' ' << split_count[f] << '\n';
  }
  out << "trees " << trees.size() << '\n';
  for (const auto& t : trees) {
    out << "tree " << t.nodes.size() << '\n';
    for (const auto& n : t.nodes) {
      out << n.feature << ' ' << n.threshold << ' ' << (n.missing_left ? 1 : 0) << ' ' << n.left << ' ' << n.right
          << ' ' << n.value << ' ' << n.gain << ' ' << n.count << '\n';
    }
  }
  if (!out) throw DataError("failed writing " + path.string());
}

GbdtModel GbdtModel::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto fail = [&](const std::string& what) { return DataError(path.string() + ": " + what); };
  std::string line;
  if (!next_data_line(in, line) || line != "cqa-gbdt 1") throw fail("not a GBDT model file");
  GbdtModel m;
  std::string key;
  if (!(in >> key) || key != "config" || !std::getline(in, line)) throw fail("missing config");
  m.config = train_config_from_json(nlohmann::ordered_json::parse(line));
  std::size_t count = 0;
  if (!(in >> key >> m.base_score) || key != "base_score") throw fail("missing base_score");
  if (!(in >> key >> count) || key != "features") throw fail("missing features");
  m.feature_names.resize(count);
  m.gain_sum.resize(count);
  m.split_count.resize(count);
  for (std::size_t f = 0; f < count; ++f) {
    if (!(in >> m.feature_names[f] >> m.gain_sum[f] >> m.split_count[f])) throw fail("truncated feature list");
  }
  if (!(in >> key >> count) || key != "trees") throw fail("missing trees");
  m.trees.resize(count);
  for (auto& t : m.trees) {
    std::size_t nodes = 0;
    if (!(in >> key >> nodes) || key != "tree") throw fail("bad tree header");
    t.nodes.resize(nodes);
    for (auto& n : t.nodes) {
      int ml = 0;
      if (!(in >> n.feature >> n.threshold >> ml >> n.left >> n.right >> n.value >> n.gain >> n.count)) {
        throw fail("truncated tree");
      }
      n.missing_left = ml != 0;
      if (!n.is_leaf() && (n.left < 0 || n.right < 0 || static_cast<std::size_t>(n.left) >= nodes ||
                           static_cast<std::size_t>(n.right) >= nodes || static_cast<std::size_t>(n.feature) >= count)) {
        throw fail("corrupt tree node");
      }
    }
  }
  return m;
}

}  // namespace cqa
