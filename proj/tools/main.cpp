#include <cstdlib>
#include <iostream>
#include <optional>
#include <string_view>

#include "CLI11.hpp"
#include "commands.hpp"
#include "cqa/error.hpp"

using namespace cqa;
using namespace cqa::cli;

namespace {

enum Exit { ok = 0, usage = 2, data = 3, internal = 4 };

// --config has to be read before the flags are bound so that flags win.
std::optional<std::string> find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.starts_with("--config=")) return std::string(a.substr(9));
  }
  return std::nullopt;
}

int run(int argc, char** argv) {
  RunConfig cfg;
  if (const auto path = find_config(argc, argv)) {
    if (!fs::exists(*path)) throw UsageError("config file " + *path + " does not exist");
    cfg = load_run_config(*path);
  }
  CommandOptions opt;
  std::string classifier;
  std::optional<std::uint64_t> learner_seed;
  std::string config_path;

  CLI::App app{"Best-answer prediction for community question answering dumps", "cqa"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.add_option("--workspace,-w", cfg.workspace, "Workspace directory (default: $CQA_WORKSPACE)");
  app.add_option("--config", config_path, "JSON run configuration; flags override it");
  app.add_flag("--force", cfg.force, "Rebuild outputs even when their manifest is unchanged");

  auto* ingest = app.add_subcommand("ingest", "Parse a Stack Exchange dump into the workspace dataset");
  ingest->add_option("--dump-dir", cfg.dump_dir, "Directory with Posts.xml, Users.xml, Comments.xml");
  ingest->add_option("--out", cfg.workspace, "Workspace to write (same as --workspace)");
  ingest->add_option("--site", cfg.site, "Site name for the summary");

  auto* lda = app.add_subcommand("lda-train", "Train LDA for each K in the grid and keep the most coherent");
  lda->add_option("--k-grid", cfg.lda.k_grid, "Topic counts to try")->delimiter(',');
  lda->add_option("--seed", cfg.lda.seed, "Gibbs sampler seed");
  lda->add_option("--iterations", cfg.lda.iterations, "Training sweeps")->check(CLI::PositiveNumber);
  lda->add_option("--alpha", cfg.lda.alpha, "Document-topic prior (<= 0: 50/K)");
  lda->add_option("--beta", cfg.lda.beta, "Topic-word prior")->check(CLI::PositiveNumber);
  lda->add_option("--top-n", cfg.lda.top_n, "Words per topic for coherence");
  lda->add_option("--min-df", cfg.lda.min_df, "Minimum document frequency")->check(CLI::PositiveNumber);
  lda->add_option("--stopwords", cfg.lda.stopwords, "Stop word file, one word per line")->check(CLI::ExistingFile);

  auto add_groups = [&](CLI::App* sub) {
    sub->add_option("--groups", cfg.groups, "Comma-separated groups from S,T,A,Q,UR, or all");
    sub->add_flag("--pr,!--no-pr", cfg.percent_rank, "Include percent-rank columns (default on)");
  };
  auto add_learner = [&](CLI::App* sub) {
    sub->add_option("--classifier", classifier, "gbdt or rf");
    sub->add_option("--k", cfg.k, "Cross-validation folds");
    sub->add_option("--fold-seed", cfg.fold_seed, "Fold assignment seed");
    sub->add_option("--seed", learner_seed, "Learner seed");
    sub->add_option("--trees", cfg.learner.gbdt.n_trees, "GBDT trees")->check(CLI::PositiveNumber);
    sub->add_option("--learning-rate", cfg.learner.gbdt.learning_rate, "GBDT shrinkage")->check(CLI::PositiveNumber);
    sub->add_option("--leaves", cfg.learner.gbdt.max_leaves, "GBDT leaves per tree");
    sub->add_option("--min-samples-leaf", cfg.learner.gbdt.min_samples_leaf, "GBDT minimum rows per leaf");
    sub->add_option("--lambda", cfg.learner.gbdt.lambda, "GBDT L2 regularisation");
    sub->add_option("--bins", cfg.learner.gbdt.n_bins, "Histogram bins per feature");
    sub->add_option("--positive-weight", cfg.learner.gbdt.positive_weight, "GBDT weight of positive rows");
    sub->add_option("--rf-trees", cfg.learner.forest.n_trees, "Random forest trees")->check(CLI::PositiveNumber);
    sub->add_option("--rf-min-samples-leaf", cfg.learner.forest.min_samples_leaf, "Random forest minimum leaf rows");
    sub->add_option("--rf-features", cfg.learner.forest.features_per_node, "Features tried per node (0: sqrt d)");
    sub->add_option("--run-id", opt.run_id, "Name of the run directory under runs/");
  };

  auto* features = app.add_subcommand("features", "Build the feature CSV");
  add_groups(features);
  features->add_option("--infer-iterations", cfg.lda.infer_iterations, "Topic inference sweeps per post");
  features->add_option("--infer-seed", cfg.lda.infer_seed, "Topic inference seed");
  features->add_flag("!--no-graph", opt.write_graph, "Skip writing the user graph edge list");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate one feature group set");
  add_groups(evaluate);
  add_learner(evaluate);
  evaluate->add_option("--baseline", opt.baseline, "Run id to compare against with a paired t-test");

  auto* select = app.add_subcommand("select", "Greedy forward selection over feature groups");
  add_groups(select);
  add_learner(select);

  auto* report = app.add_subcommand("report", "AUC table over all runs, or feature importance for one run");
  report->add_option("--run-id", opt.run_id, "Run to explain; omit for the AUC table");
  report->add_option("--top", opt.top, "Importance rows")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  if (!classifier.empty()) cfg.learner.classifier = parse_classifier(classifier);
  if (learner_seed) cfg.learner.gbdt.seed = cfg.learner.forest.seed = *learner_seed;
  if (cfg.workspace.empty()) {
    if (const char* env = std::getenv("CQA_WORKSPACE")) cfg.workspace = env;
  }
  if (cfg.workspace.empty()) throw UsageError("no workspace: pass --workspace or set CQA_WORKSPACE");
  cfg.learner.gbdt.validate();
  cfg.learner.forest.validate();

  const Workspace ws{fs::absolute(cfg.workspace).lexically_normal()};
  if (!ingest->parsed() && !fs::is_directory(ws.root)) {
    throw DataError("workspace " + ws.root.string() + " does not exist: run `cqa ingest` first");
  }
  WorkspaceLock lock(ws.root);
  if (ingest->parsed()) run_ingest(ws, cfg, opt, std::cout);
  if (lda->parsed()) run_lda_train(ws, cfg, std::cout);
  if (features->parsed()) run_features(ws, cfg, opt, std::cout);
  if (evaluate->parsed()) run_evaluate(ws, cfg, opt, std::cout);
  if (select->parsed()) run_select(ws, cfg, opt, std::cout);
  if (report->parsed()) run_report(ws, cfg, opt, std::cout);
  return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "cqa: " << e.what() << '\n';
    return Exit::usage;
  } catch (const DataError& e) {
    std::cerr << "cqa: " << e.what() << '\n';
    return Exit::data;
  } catch (const std::exception& e) {
    std::cerr << "cqa: internal error: " << e.what() << '\n';
    return Exit::internal;
  }
}
