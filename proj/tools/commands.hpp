#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "run_config.hpp"
#include "workspace.hpp"

namespace cqa::cli {

// Per-command options that are not part of RunConfig.
struct CommandOptions {
  std::string run_id;       // evaluate/select/report
  std::string baseline;     // evaluate: run id to t-test against
  std::size_t top = 20;     // report: importance rows
  bool write_graph = true;  // features: also dump the user graph
};

void run_ingest(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void run_lda_train(const Workspace& ws, const RunConfig& cfg, std::ostream& log);
void run_features(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void run_evaluate(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void run_select(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void run_report(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

inline constexpr const char* kToolVersion = "cqa 0.1.0";

}  // namespace cqa::cli
