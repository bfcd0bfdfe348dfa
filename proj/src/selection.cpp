#include "cqa/selection.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>

#include "cqa/error.hpp"

namespace cqa {

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Evaluation evaluate_groups(const FeatureTable& table, const GroupSet& set, const LearnerConfig& config,
                           std::span<const int> folds, int k) {
  const auto cols = table.column_indices(set);
  if (cols.empty()) throw DataError("feature set " + set.label() + " selects no columns");
  return {set, cross_validate(table.select(cols), table.labels, folds, k, config)};
}

SelectionTrace greedy_select(const FeatureTable& table, std::span<const Group> groups, bool percent_rank,
                             const LearnerConfig& config, std::span<const int> folds, int k) {
  std::vector<Group> remaining;
  for (Group g : kSelectableGroups) {
    if (std::find(groups.begin(), groups.end(), g) != groups.end()) remaining.push_back(g);
  }
  if (remaining.empty()) throw UsageError("greedy_select: no groups to select from");

  SelectionTrace trace;
  trace.classifier = config.classifier;
  GroupSet current;
  current.percent_rank = percent_rank;
  while (!remaining.empty()) {
    SelectionStep step;
    std::size_t best = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      step.candidates.push_back(evaluate_groups(table, current.with(remaining[i]), config, folds, k));
      if (step.candidates[i].report.mean > step.candidates[best].report.mean) best = i;
    }
    step.added = remaining[best];
    step.set = step.candidates[best].set;
    step.report = step.candidates[best].report;
    if (!trace.steps.empty()) step.vs_previous = paired_t_test(step.report.fold_auc, trace.steps.back().report.fold_auc);
    current = step.set;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

void SelectionTrace::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "step,classifier,added,set,selected,mean_auc,stddev";
  const std::size_t k = steps.empty() ? 0 : steps.front().report.fold_auc.size();
  for (std::size_t f = 0; f < k; ++f) out << ",fold" << f;
  out << ",t_vs_previous,p_vs_previous\n";
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto& step = steps[s];
    for (const auto& c : step.candidates) {
      const bool selected = c.set.label() == step.set.label();
      out << s + 1 << ',' << to_string(classifier) << ',' << group_name(c.set.groups.back()) << ',' << c.set.label()
          << ',' << (selected ? 1 : 0) << ',' << c.report.mean << ',' << c.report.stddev;
      for (double a : c.report.fold_auc) out << ',' << a;
      if (selected && step.vs_previous) {
        out << ',' << step.vs_previous->t << ',' << step.vs_previous->p;
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
}

AucTable report_table(const std::vector<AucCell>& cells) {
  AucTable table;
  std::vector<std::pair<int, std::string>> row_keys;
  for (const auto& c : cells) {
    if (std::find(table.columns.begin(), table.columns.end(), c.classifier) == table.columns.end()) {
      table.columns.push_back(c.classifier);
    }
    const std::pair<int, std::string> key{c.group_count, c.set_key};
    if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) row_keys.push_back(key);
  }
  std::sort(table.columns.begin(), table.columns.end());
  std::sort(row_keys.begin(), row_keys.end());
  for (const auto& [n, key] : row_keys) table.rows.push_back(key);
  table.cells.assign(table.rows.size(), std::vector<std::optional<double>>(table.columns.size()));
  for (const auto& c : cells) {
    const auto r = static_cast<std::size_t>(std::find(table.rows.begin(), table.rows.end(), c.set_key) - table.rows.begin());
    const auto col = static_cast<std::size_t>(
        std::find(table.columns.begin(), table.columns.end(), c.classifier) - table.columns.begin());
    table.cells[r][col] = c.mean_auc;
  }
  return table;
}

void AucTable::write_text(std::ostream& out) const {
  std::size_t width = std::string("Feature Group").size();
  for (const auto& r : rows) width = std::max(width, r.size());
  out << std::left << std::setw(static_cast<int>(width)) << "Feature Group";
  for (auto c : columns) out << " | " << std::setw(6) << (c == Classifier::gbdt ? "GBDT" : "RF");
  out << '\n' << std::string(width, '-');
  for (std::size_t i = 0; i < columns.size(); ++i) out << "-+-------";
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << std::setw(static_cast<int>(width)) << rows[r];
    for (const auto& cell : cells[r]) out << " | " << std::setw(6) << (cell ? fixed3(*cell) : "-");
    out << '\n';
  }
  out << std::right;
}

void AucTable::write_csv(std::ostream& out) const {
  out << "feature_group";
  for (auto c : columns) out << ',' << to_string(c);
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << rows[r];
    for (const auto& cell : cells[r]) out << ',' << (cell ? fixed3(*cell) : "");
    out << '\n';
  }
}

std::vector<ImportanceRow> report_importance(const GbdtModel& model, std::size_t top_n) {
  std::vector<ImportanceRow> rows;
  for (const auto& imp : model.importance()) {
    if (rows.size() >= top_n) break;
    const auto dot = imp.feature.find('.');
    std::string group = dot == std::string::npos ? "" : imp.feature.substr(0, dot);
    for (auto& c : group) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    rows.push_back({imp.feature, group, imp.average_gain, imp.splits});
  }
  return rows;
}

void write_importance_text(std::ostream& out, const std::vector<ImportanceRow>& rows) {
  std::size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.feature.size());
  out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(width) + 2) << "feature" << std::setw(7)
      << "group" << std::right << std::setw(14) << "avg_gain" << std::setw(9) << "splits" << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char gain[32];
    std::snprintf(gain, sizeof gain, "%.4f", rows[i].average_gain);
    out << std::left << std::setw(5) << i + 1 << std::setw(static_cast<int>(width) + 2) << rows[i].feature
        << std::setw(7) << rows[i].group << std::right << std::setw(14) << gain << std::setw(9) << rows[i].splits
        << '\n';
  }
}

void write_importance_csv(std::ostream& out, const std::vector<ImportanceRow>& rows) {
  out.precision(17);
  out << "rank,feature,group,average_gain,splits\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i + 1 << ',' << rows[i].feature << ',' << rows[i].group << ',' << rows[i].average_gain << ','
        << rows[i].splits << '\n';
  }
}

void write_importance_svg(std::ostream& out, const std::vector<ImportanceRow>& rows) {
  constexpr int kBar = 18, kGap = 4, kLabel = 260, kPlot = 400, kMargin = 10;
  const int height = kMargin * 2 + static_cast<int>(rows.size()) * (kBar + kGap);
  double max_gain = 0;
  for (const auto& r : rows) max_gain = std::max(max_gain, r.average_gain);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLabel + kPlot + 3 * kMargin + 80 << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int y = kMargin + static_cast<int>(i) * (kBar + kGap);
    const int w = max_gain > 0 ? static_cast<int>(kPlot * rows[i].average_gain / max_gain) : 0;
    char gain[32];
    std::snprintf(gain, sizeof gain, "%.3f", rows[i].average_gain);
    out << "  <text x=\"" << kMargin + kLabel << "\" y=\"" << y + 13 << "\" text-anchor=\"end\">"
        << xml_escape(rows[i].feature) << "</text>\n"
        << "  <rect x=\"" << kLabel + 2 * kMargin << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << kBar
        << "\" fill=\"#4a78a8\"/>\n"
        << "  <text x=\"" << kLabel + 3 * kMargin + w << "\" y=\"" << y + 13 << "\">" << gain << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cqa
