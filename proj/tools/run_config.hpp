#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cqa/artifact.hpp"
#include "cqa/learner/evaluation.hpp"

namespace cqa::cli {

struct LdaSettings {
  std::vector<int> k_grid{10, 20, 40, 80, 120};
  double alpha = 0.0;  // <= 0: 50 / K
  double beta = 0.01;
  int iterations = 500;
  int infer_iterations = 100;
  std::uint64_t seed = 1;
  std::uint64_t infer_seed = 7;
  int top_n = 10;
  int min_df = 2;
  std::string stopwords;  // file, empty = built-in list
};

// Everything a command can be configured with. Loaded from the --config JSON
// document (same field names), then overridden by flags.
struct RunConfig {
  std::string workspace;
  std::string dump_dir;
  std::string site;
  LdaSettings lda;
  LearnerConfig learner;
  int k = 5;
  std::uint64_t fold_seed = 1;
  std::string groups = "all";
  bool percent_rank = true;
  bool force = false;
};

RunConfig run_config_from_json(const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const LdaSettings& s);

}  // namespace cqa::cli
