#include "run_config.hpp"

#include "cqa/error.hpp"

namespace cqa::cli {

namespace {

template <typename T>
void take(const nlohmann::ordered_json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

nlohmann::ordered_json to_json(const LdaSettings& s) {
  return {{"k_grid", s.k_grid},
          {"alpha", s.alpha},
          {"beta", s.beta},
          {"iterations", s.iterations},
          {"infer_iterations", s.infer_iterations},
          {"seed", s.seed},
          {"infer_seed", s.infer_seed},
          {"top_n", s.top_n},
          {"min_df", s.min_df},
          {"stopwords", s.stopwords}};
}

RunConfig run_config_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be a JSON object");
  RunConfig c;
  try {
    take(j, "workspace", c.workspace);
    take(j, "dump_dir", c.dump_dir);
    take(j, "site", c.site);
    take(j, "k", c.k);
    take(j, "fold_seed", c.fold_seed);
    take(j, "groups", c.groups);
    take(j, "pr", c.percent_rank);
    if (j.contains("lda")) {
      const auto& l = j.at("lda");
      take(l, "k_grid", c.lda.k_grid);
      take(l, "alpha", c.lda.alpha);
      take(l, "beta", c.lda.beta);
      take(l, "iterations", c.lda.iterations);
      take(l, "infer_iterations", c.lda.infer_iterations);
      take(l, "seed", c.lda.seed);
      take(l, "infer_seed", c.lda.infer_seed);
      take(l, "top_n", c.lda.top_n);
      take(l, "min_df", c.lda.min_df);
      take(l, "stopwords", c.lda.stopwords);
    }
    if (j.contains("learner")) {
      const auto& l = j.at("learner");
      if (l.contains("classifier")) c.learner.classifier = parse_classifier(l.at("classifier").get<std::string>());
      if (l.contains("gbdt")) c.learner.gbdt = train_config_from_json(l.at("gbdt"), c.learner.gbdt);
      if (l.contains("rf")) c.learner.forest = forest_config_from_json(l.at("rf"), c.learner.forest);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace cqa::cli
