#include "cqa/feature_table.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "cqa/error.hpp"
#include "cqa/relation_features.hpp"
#include "cqa/text.hpp"
#include "cqa/topic_features.hpp"
#include "cqa/user_features.hpp"

namespace cqa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<Group, 6> kColumnOrder{Group::S, Group::T, Group::A, Group::Q, Group::Diff, Group::UR};

std::string suffix(Variant v) {
  switch (v) {
    case Variant::raw: return "";
    case Variant::rank: return ".rank";
    case Variant::prank: return ".prank";
  }
  return "";
}

std::size_t canonical_index(Group g) {
  return static_cast<std::size_t>(std::find(kColumnOrder.begin(), kColumnOrder.end(), g) - kColumnOrder.begin());
}

// Raw per-answer values of one group for one thread, answers x features.
using Block = std::vector<std::vector<double>>;

}  // namespace

std::string group_name(Group g) {
  switch (g) {
    case Group::S: return "S";
    case Group::T: return "T";
    case Group::A: return "A";
    case Group::Q: return "Q";
    case Group::UR: return "UR";
    case Group::Diff: return "DIFF";
  }
  return "?";
}

std::string column_prefix(Group g) {
  std::string p = group_name(g);
  for (auto& c : p) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return p;
}

Group parse_group(const std::string& name) {
  std::string upper = name;
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Group g : {Group::S, Group::T, Group::A, Group::Q, Group::UR, Group::Diff}) {
    if (group_name(g) == upper) return g;
  }
  throw UsageError("unknown feature group '" + name + "' (expected S, T, A, Q or UR)");
}

bool GroupSet::contains(Group g) const { return std::find(groups.begin(), groups.end(), g) != groups.end(); }

GroupSet GroupSet::with(Group g) const {
  GroupSet out = *this;
  if (!out.contains(g)) out.groups.push_back(g);
  return out;
}

std::string GroupSet::label() const {
  std::string s;
  for (Group g : groups) s += (s.empty() ? "" : "+") + group_name(g);
  if (percent_rank) s += "+PR";
  return s;
}

std::string GroupSet::key() const {
  GroupSet sorted = *this;
  std::sort(sorted.groups.begin(), sorted.groups.end(),
            [](Group a, Group b) { return canonical_index(a) < canonical_index(b); });
  return sorted.label();
}

GroupSet parse_group_set(const std::string& list, bool percent_rank) {
  GroupSet set;
  set.percent_rank = percent_rank;
  if (list == "all" || list == "ALL" || list == "All") {
    set.groups.assign(kSelectableGroups.begin(), kSelectableGroups.end());
    return set;
  }
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const Group g = parse_group(item);
    if (g == Group::Diff) throw UsageError("difference features are implied by A and Q; do not select them directly");
    if (set.contains(g)) throw UsageError("duplicate feature group '" + item + "'");
    set.groups.push_back(g);
  }
  if (set.groups.empty()) throw UsageError("empty feature group list");
  return set;
}

std::vector<std::size_t> FeatureTable::column_indices(const GroupSet& set) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    const bool group_on = c.group == Group::Diff ? set.includes_difference() : set.contains(c.group);
    if (!group_on) continue;
    if (c.variant == Variant::prank && !set.percent_rank) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> FeatureTable::column_names(const std::vector<std::size_t>& indices) const {
  std::vector<std::string> names;
  for (auto i : indices) names.push_back(columns[i].name);
  return names;
}

bool FeatureTable::has_group(Group g) const {
  return std::any_of(columns.begin(), columns.end(), [&](const FeatureColumn& c) { return c.group == g; });
}

void FeatureTable::write_csv(std::ostream& out, const Manifest& manifest, const std::vector<std::size_t>& indices) const {
  write_manifest_line(out, manifest);
  out << "question_id,answer_id,label";
  for (auto i : indices) out << ',' << columns[i].name;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < rows(); ++r) {
    out << question_ids[r] << ',' << answer_ids[r] << ',' << labels[r];
    for (auto i : indices) {
      out << ',';
      const double v = values(r, i);
      if (is_missing(v)) continue;
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

FeatureTable FeatureTable::read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto fail = [&](std::size_t line, const std::string& what) {
    return DataError(path.string() + ": row " + std::to_string(line) + ": " + what);
  };
  std::string line;
  if (!next_data_line(in, line)) throw DataError(path.string() + ": empty feature file");
  FeatureTable t;
  {
    std::stringstream header(line);
    std::string name;
    std::vector<std::string> names;
    while (std::getline(header, name, ',')) names.push_back(name);
    if (names.size() < 3 || names[0] != "question_id" || names[1] != "answer_id" || names[2] != "label") {
      throw DataError(path.string() + ": missing key columns");
    }
    for (std::size_t i = 3; i < names.size(); ++i) {
      FeatureColumn c;
      c.name = names[i];
      const auto dot = c.name.find('.');
      if (dot == std::string::npos) throw DataError(path.string() + ": bad column name " + c.name);
      c.group = parse_group(c.name.substr(0, dot));
      if (c.name.ends_with(".prank")) {
        c.variant = Variant::prank;
      } else if (c.name.ends_with(".rank")) {
        c.variant = Variant::rank;
      }
      t.columns.push_back(std::move(c));
    }
  }
  std::vector<double> data;
  std::size_t row = 0;
  while (next_data_line(in, line)) {
    ++row;
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view cell(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
      if (field == 0 || field == 1) {
        Id id = 0;
        if (std::from_chars(cell.data(), cell.data() + cell.size(), id).ec != std::errc()) throw fail(row, "bad id");
        (field == 0 ? t.question_ids : t.answer_ids).push_back(id);
      } else if (field == 2) {
        if (cell != "0" && cell != "1") throw fail(row, "label must be 0 or 1");
        t.labels.push_back(cell == "1" ? 1 : 0);
      } else {
        double v = kNaN;
        if (!cell.empty()) {
          const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) throw fail(row, "bad number");
        }
        data.push_back(v);
      }
      ++field;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != t.columns.size() + 3) throw fail(row, "wrong field count");
  }
  t.values = Matrix(t.labels.size(), t.columns.size());
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) t.values(r, c) = data[r * t.columns.size() + c];
  }
  return t;
}

std::vector<std::vector<std::string>> lda_documents(const Dataset& ds) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : ds.threads) {
    docs.push_back(tokenize(t.question.body_text));
    for (const auto& a : t.answers) docs.push_back(tokenize(a.body_text));
  }
  return docs;
}

FeatureTable build_feature_table(const Dataset& ds, const TopicModel* topics, const FeatureOptions& options) {
  // Feature names per group, in output order.
  std::map<Group, std::vector<std::string>> names;
  for (auto n : ShallowFeatures::kNames) names[Group::S].emplace_back(n);
  if (topics) {
    for (auto n : TextualFeatures::kNames) names[Group::T].emplace_back(n);
  }
  for (auto n : UserFeatureVector::kNames) {
    names[Group::A].emplace_back(n);
    names[Group::Q].emplace_back(n);
    names[Group::Diff].emplace_back(n);
  }
  for (auto n : RelationFeatures::kNames) names[Group::UR].emplace_back(n);

  FeatureTable table;
  // base column index for each (group, feature): raw, rank, prank follow in order.
  std::map<Group, std::size_t> first_column;
  for (Group g : kColumnOrder) {
    if (!names.contains(g)) continue;
    first_column[g] = table.columns.size();
    for (const auto& n : names[g]) {
      const std::string base = column_prefix(g) + "." + n;
      for (Variant v : {Variant::raw, Variant::rank, Variant::prank}) table.columns.push_back({base + suffix(v), g, v});
    }
  }
  table.values = Matrix(ds.instances.size(), table.columns.size(), kNaN);

  const auto graph = build_graph(ds.threads);
  std::size_t row = 0;
  for (std::size_t ti = 0; ti < ds.threads.size(); ++ti) {
    const Thread& thread = ds.threads[ti];
    const std::size_t n = thread.answers.size();
    std::map<Group, Block> blocks;

    for (const auto& f : extract_shallow(thread)) {
      const auto v = f.values();
      blocks[Group::S].emplace_back(v.begin(), v.end());
    }
    if (topics) {
      const auto q_theta = infer(*topics, topics->encode(tokenize(thread.question.body_text)), options.infer_iterations,
                                 options.infer_seed ^ static_cast<std::uint64_t>(thread.question.post_id));
      for (const auto& a : thread.answers) {
        const auto a_theta = infer(*topics, topics->encode(tokenize(a.body_text)), options.infer_iterations,
                                   options.infer_seed ^ static_cast<std::uint64_t>(a.post_id));
        const auto v = extract_textual(q_theta, a_theta).values();
        blocks[Group::T].emplace_back(v.begin(), v.end());
      }
    }
    const auto questioner = extract_questioner(thread, ds.users);
    for (const auto& a : thread.answers) {
      const auto answerer = extract_answerer(a, ds.users);
      const auto av = answerer.with_nan();
      const auto qv = questioner.with_nan();
      const auto dv = difference_features(questioner, answerer).with_nan();
      const auto rv = extract_relation(thread, a, graph).with_nan();
      blocks[Group::A].emplace_back(av.begin(), av.end());
      blocks[Group::Q].emplace_back(qv.begin(), qv.end());
      blocks[Group::Diff].emplace_back(dv.begin(), dv.end());
      blocks[Group::UR].emplace_back(rv.begin(), rv.end());
    }

    for (const auto& [group, block] : blocks) {
      const auto& feature_names = names[group];
      for (std::size_t f = 0; f < feature_names.size(); ++f) {
        std::vector<double> column(n);
        for (std::size_t a = 0; a < n; ++a) column[a] = block[a][f];
        const std::string base = column_prefix(group) + "." + feature_names[f];
        const auto dir_it = options.directions.find(base);
        const auto dir = dir_it == options.directions.end() ? RankDirection::higher_better : dir_it->second;
        const auto ranks = rank_within_thread(column, dir);
        const auto pranks = percent_rank(ranks, n);
        const std::size_t c = first_column[group] + 3 * f;
        for (std::size_t a = 0; a < n; ++a) {
          table.values(row + a, c) = column[a];
          table.values(row + a, c + 1) = ranks[a];
          table.values(row + a, c + 2) = pranks[a];
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      table.question_ids.push_back(thread.question.post_id);
      table.answer_ids.push_back(thread.answers[a].post_id);
      table.labels.push_back(thread.question.accepted_answer_id == thread.answers[a].post_id ? 1 : 0);
    }
    row += n;
  }
  return table;
}

}  // namespace cqa
