#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cqa/feature_table.hpp"
#include "cqa/learner/evaluation.hpp"

namespace cqa {

struct Evaluation {
  GroupSet set;
  EvaluationReport report;
};

struct SelectionStep {
  Group added = Group::S;
  GroupSet set;
  EvaluationReport report;                 // the winning candidate
  std::optional<TTestResult> vs_previous;  // paired over folds; empty on step 1
  std::vector<Evaluation> candidates;      // every evaluation run in this step
};

struct SelectionTrace {
  Classifier classifier = Classifier::gbdt;
  std::vector<SelectionStep> steps;

  void write_csv(std::ostream& out) const;
};

// Evaluates one group set by k-fold cross-validation on precomputed folds.
Evaluation evaluate_groups(const FeatureTable& table, const GroupSet& set, const LearnerConfig& config,
                           std::span<const int> folds, int k);

// Forward selection over whole groups: each step adds the remaining group
// with the best mean CV AUC (ties go to the earlier group in S, T, A, Q, UR
// order) until every group is in.
SelectionTrace greedy_select(const FeatureTable& table, std::span<const Group> groups, bool percent_rank,
                             const LearnerConfig& config, std::span<const int> folds, int k);

struct AucCell {
  std::string set_key;  // GroupSet::key()
  int group_count = 0;
  Classifier classifier = Classifier::gbdt;
  double mean_auc = 0;
};

// Feature sets x classifiers grid of mean AUCs, rows ordered by group count
// then key, columns GBDT then RF (only those present).
struct AucTable {
  std::vector<std::string> rows;
  std::vector<Classifier> columns;
  std::vector<std::vector<std::optional<double>>> cells;

  void write_text(std::ostream& out) const;
  void write_csv(std::ostream& out) const;
};

AucTable report_table(const std::vector<AucCell>& cells);

struct ImportanceRow {
  std::string feature;
  std::string group;
  double average_gain = 0;
  std::int64_t splits = 0;
};

std::vector<ImportanceRow> report_importance(const GbdtModel& model, std::size_t top_n);
void write_importance_text(std::ostream& out, const std::vector<ImportanceRow>& rows);
void write_importance_csv(std::ostream& out, const std::vector<ImportanceRow>& rows);
// Horizontal bar chart of average gain, as a standalone SVG document.
void write_importance_svg(std::ostream& out, const std::vector<ImportanceRow>& rows);

}  // namespace cqa
