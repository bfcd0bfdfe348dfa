#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cqa/artifact.hpp"
#include "cqa/corpus.hpp"
#include "cqa/learner/matrix.hpp"
#include "cqa/shallow_features.hpp"
#include "cqa/topic_model.hpp"

namespace cqa {

// Selectable groups in canonical order. Difference columns are not
// selectable; they ride along whenever both A and Q are selected.
enum class Group { S, T, A, Q, UR, Diff };
inline constexpr std::array<Group, 5> kSelectableGroups{Group::S, Group::T, Group::A, Group::Q, Group::UR};

std::string group_name(Group g);     // "S", "T", "A", "Q", "UR", "DIFF"
std::string column_prefix(Group g);  // "s", "t", "a", "q", "ur", "diff"
Group parse_group(const std::string& name);

struct GroupSet {
  std::vector<Group> groups;  // insertion order, no duplicates, no Diff
  bool percent_rank = true;

  bool contains(Group g) const;
  bool includes_difference() const { return contains(Group::A) && contains(Group::Q); }
  GroupSet with(Group g) const;
  // "S+UR+A+PR" (insertion order).
  std::string label() const;
  // Canonical-order label, used as a stable key.
  std::string key() const;
};

// "S,T,A" or "all"; throws UsageError for unknown or duplicate names.
GroupSet parse_group_set(const std::string& list, bool percent_rank);

enum class Variant { raw, rank, prank };

struct FeatureColumn {
  std::string name;  // "<group>.<feature>[.rank|.prank]"
  Group group = Group::S;
  Variant variant = Variant::raw;
};

struct FeatureOptions {
  int infer_iterations = 100;
  std::uint64_t infer_seed = 7;
  // Ranking direction per base feature name ("s.age"); unlisted features are higher-better.
  std::map<std::string, RankDirection> directions{{"s.age", RankDirection::lower_better}};
};

class FeatureTable {
 public:
  std::vector<FeatureColumn> columns;
  std::vector<Id> question_ids;
  std::vector<Id> answer_ids;
  std::vector<int> labels;
  Matrix values;  // instances x columns, NaN = missing

  std::size_t rows() const { return labels.size(); }
  std::vector<std::size_t> column_indices(const GroupSet& set) const;
  std::vector<std::string> column_names(const std::vector<std::size_t>& indices) const;
  Matrix select(const std::vector<std::size_t>& indices) const { return values.select_cols(indices); }
  bool has_group(Group g) const;

  // Key columns question_id, answer_id, label, then the selected feature
  // columns. Missing values are empty cells.
  void write_csv(std::ostream& out, const Manifest& manifest, const std::vector<std::size_t>& indices) const;
  static FeatureTable read_csv(const std::filesystem::path& path);
};

// Builds every group's raw, rank and percent-rank columns. Topic columns are
// produced only when `topics` is given.
FeatureTable build_feature_table(const Dataset& ds, const TopicModel* topics, const FeatureOptions& options = {});

// One document per post of the retained threads, tokenized for topic modelling.
std::vector<std::vector<std::string>> lda_documents(const Dataset& ds);

}  // namespace cqa
