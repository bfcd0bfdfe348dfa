#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <sstream>

#include "cqa/dataset_io.hpp"
#include "cqa/error.hpp"
#include "cqa/feature_table.hpp"
#include "cqa/relation_features.hpp"
#include "cqa/selection.hpp"
#include "cqa/topic_model.hpp"

namespace cqa::cli {

namespace {

Manifest base_manifest(const std::string& command, Manifest config, Manifest seeds, Manifest inputs) {
  return Manifest{{"command", command},
                  {"tool", kToolVersion},
                  {"config", std::move(config)},
                  {"seeds", std::move(seeds)},
                  {"inputs", std::move(inputs)}};
}

std::vector<fs::path> dataset_files(const Workspace& ws) {
  std::vector<fs::path> out;
  for (const char* f : kDatasetFiles) out.push_back(ws.dataset_dir() / f);
  return out;
}

void require_dataset(const Workspace& ws) {
  for (const auto& f : dataset_files(ws)) ws.require(f, "ingest");
}

bool skip_if_current(const std::vector<fs::path>& outputs, const Manifest& manifest, const RunConfig& cfg,
                     const Workspace& ws, std::ostream& log) {
  if (cfg.force || !up_to_date(outputs, manifest)) return false;
  log << ws.relative(outputs.front()) << " is up to date (use --force to rebuild)\n";
  return true;
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

void check_k(int k) {
  if (k < 2) throw UsageError("--k must be at least 2");
}

Manifest learner_seeds(const LearnerConfig& l) {
  return l.classifier == Classifier::gbdt ? Manifest{{"gbdt", l.gbdt.seed}} : Manifest{{"rf", l.forest.seed}};
}

// Loads features.csv and checks that it carries every column `set` needs.
FeatureTable load_features(const Workspace& ws, const GroupSet& set) {
  ws.require(ws.features_csv(), "features");
  auto table = FeatureTable::read_csv(ws.features_csv());
  for (Group g : set.groups) {
    if (!table.has_group(g)) {
      throw DataError("features.csv has no " + group_name(g) + " columns; re-run `cqa features` with that group");
    }
  }
  if (set.includes_difference() && !table.has_group(Group::Diff)) {
    throw DataError("features.csv has no diff columns; re-run `cqa features` with A and Q");
  }
  if (set.percent_rank) {
    const bool any_prank = std::any_of(table.columns.begin(), table.columns.end(),
                                       [](const FeatureColumn& c) { return c.variant == Variant::prank; });
    if (!any_prank) throw DataError("features.csv was built without percent ranks; re-run `cqa features --pr`");
  }
  return table;
}

std::string group_list(const GroupSet& set) {
  std::string out;
  for (Group g : set.groups) out += (out.empty() ? "" : ",") + group_name(g);
  return out;
}

std::string default_run_id(Classifier c, const GroupSet& set) { return to_string(c) + "_" + set.key(); }

void check_run_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.find('/') != std::string::npos) {
    throw UsageError("invalid run id '" + id + "'");
  }
}

// Fold AUCs of a previous evaluate run.
std::vector<double> read_fold_aucs(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  std::vector<double> out;
  next_data_line(in, line);  // header
  while (next_data_line(in, line)) {
    const auto comma = line.find(',');
    int fold = 0;
    const auto* first = line.data();
    if (comma == std::string::npos || std::from_chars(first, first + comma, fold).ec != std::errc{}) break;
    double v = 0;
    const auto r = std::from_chars(first + comma + 1, first + line.size(), v);
    if (r.ec != std::errc{}) throw DataError(path.string() + ": bad fold row '" + line + "'");
    out.push_back(v);
  }
  return out;
}

double read_mean(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  while (next_data_line(in, line)) {
    if (line.starts_with("mean,")) return std::stod(line.substr(5));
  }
  throw DataError(path.string() + ": no mean row");
}

void write_coherence(std::ostream& out, const TopicCountSelection& sel) {
  out.precision(17);
  out << "topics,mean_coherence,selected\n";
  for (const auto& [k, c] : sel.table) out << k << ',' << c.mean << ',' << (k == sel.best_topics ? 1 : 0) << '\n';
}

}  // namespace

void run_ingest(const Workspace& ws, const RunConfig& cfg, const CommandOptions&, std::ostream& log) {
  if (cfg.dump_dir.empty()) throw UsageError("ingest needs --dump-dir");
  const fs::path dump(cfg.dump_dir);
  if (!fs::is_directory(dump)) throw DataError("dump directory " + dump.string() + " does not exist");
  Manifest inputs = Manifest::object();
  for (const char* f : {"Posts.xml", "Users.xml", "Comments.xml", "Badges.xml"}) {
    const auto p = dump / f;
    if (fs::exists(p)) {
      inputs[std::string("dump/") + f] = hash_file(p);
    } else if (std::string_view(f) != "Badges.xml") {
      throw DataError("missing dump file " + p.string());
    }
  }
  const auto manifest = base_manifest("ingest", Manifest{{"dump_dir", cfg.dump_dir}, {"site", cfg.site}},
                                      Manifest::object(), inputs);
  auto outputs = dataset_files(ws);
  outputs.push_back(ws.dataset_dir() / "summary.txt");
  if (skip_if_current(outputs, manifest, cfg, ws, log)) return;

  DumpStats stats;
  const auto ds = load_dump(dump, &stats);
  if (ds.instances.empty()) throw DataError("no thread in " + dump.string() + " has an accepted answer");
  write_dataset(ws.dataset_dir(), ds, manifest);

  const std::size_t positives = static_cast<std::size_t>(std::count_if(
      ds.instances.begin(), ds.instances.end(), [](const Instance& i) { return i.label == 1; }));
  const std::size_t negatives = ds.instances.size() - positives;
  std::ostringstream summary;
  summary << "site\tquestions\tanswers\tpositive:negative\n"
          << (cfg.site.empty() ? dump.filename().string() : cfg.site) << '\t' << ds.threads.size() << '\t'
          << ds.answer_count() << "\t1:" << std::fixed << std::setprecision(2)
          << static_cast<double>(negatives) / static_cast<double>(positives) << '\n';
  summary << "# positive ratio " << std::setprecision(4) << ds.positive_ratio() << '\n'
          << "# questions seen " << ds.stats.questions_seen << ", without answers " << ds.stats.threads_without_answers
          << ", without accepted answer " << ds.stats.threads_without_accepted << ", accepted answer missing "
          << ds.stats.accepted_answer_missing << '\n'
          << "# answers seen " << ds.stats.answers_seen << ", orphan answers " << ds.stats.orphan_answers
          << ", orphan comments " << ds.stats.orphan_comments << '\n';
  auto out = open_output(ws.dataset_dir() / "summary.txt");
  write_manifest_line(out, manifest);
  out << summary.str();

  log << summary.str();
  auto parse_line = [&](const char* name, const ParseStats& s) {
    log << "# " << name << ": " << s.rows << " rows, " << s.skipped_other_type << " other type, "
        << s.skipped_missing_attribute << " missing attributes\n";
  };
  parse_line("Posts.xml", stats.posts);
  parse_line("Users.xml", stats.users);
  parse_line("Comments.xml", stats.comments);
  if (stats.has_badges) parse_line("Badges.xml", stats.badges);
}

void run_lda_train(const Workspace& ws, const RunConfig& cfg, std::ostream& log) {
  const auto& s = cfg.lda;
  if (s.k_grid.empty()) throw UsageError("--k-grid is empty");
  for (int k : s.k_grid) {
    if (k < 1) throw UsageError("--k-grid entries must be positive");
  }
  if (s.top_n < 2) throw UsageError("--top-n must be at least 2");
  require_dataset(ws);
  Manifest inputs = ws.hashes(dataset_files(ws));
  if (!s.stopwords.empty()) inputs["file:" + s.stopwords] = hash_file(s.stopwords);
  const auto manifest = base_manifest("lda-train", to_json(s), Manifest{{"lda", s.seed}}, inputs);
  if (skip_if_current({ws.lda_model(), ws.coherence_csv()}, manifest, cfg, ws, log)) return;

  const auto ds = read_dataset(ws.dataset_dir());
  const auto stop = s.stopwords.empty() ? default_stopwords() : load_stopwords(s.stopwords);
  const auto corpus = build_lda_corpus(lda_documents(ds), stop, s.min_df);
  log << "lda corpus: " << corpus.documents.size() << " documents, " << corpus.vocabulary.size() << " words, "
      << corpus.token_count() << " tokens\n";
  LdaConfig base;
  base.alpha = s.alpha;
  base.beta = s.beta;
  base.train_iterations = s.iterations;
  base.infer_iterations = s.infer_iterations;
  base.seed = s.seed;
  const auto sel = select_topic_count(corpus, s.k_grid, base, static_cast<std::size_t>(s.top_n));
  for (const auto& [k, c] : sel.table) log << "K=" << k << " coherence " << fixed3(c.mean) << '\n';
  log << "selected K=" << sel.best_topics << '\n';

  sel.best_model.save(ws.lda_model(), manifest);
  auto out = open_output(ws.coherence_csv());
  write_manifest_line(out, manifest);
  write_coherence(out, sel);
}

void run_features(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const auto set = parse_group_set(cfg.groups, cfg.percent_rank);
  require_dataset(ws);
  auto input_files = dataset_files(ws);
  if (set.contains(Group::T)) {
    if (!fs::exists(ws.lda_model())) {
      throw DataError("topic features need lda/model.txt: run `cqa lda-train` first");
    }
    ws.require(ws.lda_model(), "lda-train");
    input_files.push_back(ws.lda_model());
  }
  Manifest config{{"groups", group_list(set)}, {"pr", set.percent_rank}};
  Manifest seeds = Manifest::object();
  if (set.contains(Group::T)) {
    config["infer_iterations"] = cfg.lda.infer_iterations;
    seeds["infer"] = cfg.lda.infer_seed;
  }
  const auto manifest = base_manifest("features", config, seeds, ws.hashes(input_files));
  std::vector<fs::path> outputs{ws.features_csv()};
  if (opt.write_graph) outputs.push_back(ws.user_graph());
  if (skip_if_current(outputs, manifest, cfg, ws, log)) return;

  const auto ds = read_dataset(ws.dataset_dir());
  std::optional<TopicModel> model;
  if (set.contains(Group::T)) model = TopicModel::load(ws.lda_model());
  FeatureOptions fo;
  fo.infer_iterations = cfg.lda.infer_iterations;
  fo.infer_seed = cfg.lda.infer_seed;
  const auto table = build_feature_table(ds, model ? &*model : nullptr, fo);
  const auto cols = table.column_indices(set);
  {
    auto out = open_output(ws.features_csv());
    table.write_csv(out, manifest, cols);
  }
  log << "features: " << table.rows() << " instances, " << cols.size() << " columns (" << set.label() << ")\n";
  if (opt.write_graph) {
    auto out = open_output(ws.user_graph());
    write_manifest_line(out, manifest);
    build_graph(ds.threads).write_edge_list(out);
  }
}

void run_evaluate(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  check_k(cfg.k);
  const auto set = parse_group_set(cfg.groups, cfg.percent_rank);
  const auto id = opt.run_id.empty() ? default_run_id(cfg.learner.classifier, set) : opt.run_id;
  check_run_id(id);
  const auto table = load_features(ws, set);

  std::vector<fs::path> input_files{ws.features_csv()};
  std::vector<double> baseline_auc;
  if (!opt.baseline.empty()) {
    check_run_id(opt.baseline);
    const auto base = ws.run_dir(opt.baseline) / "evaluation.csv";
    if (!fs::exists(base)) {
      throw DataError("baseline run " + opt.baseline + " not found: run `cqa evaluate` for it first");
    }
    ws.require(base, "evaluate --run-id " + opt.baseline);
    const auto bm = read_manifest(base);
    const auto bc = bm ? bm->at("config") : Manifest::object();
    if (bc.value("k", 0) != cfg.k || bc.value("fold_seed", 0ULL) != cfg.fold_seed) {
      throw DataError("baseline run " + opt.baseline +
                      " used different folds; the t-test needs the same --k and --fold-seed");
    }
    baseline_auc = read_fold_aucs(base);
    input_files.push_back(base);
  }

  Manifest config{{"groups", group_list(set)},   {"key", set.key()},   {"group_count", set.groups.size()},
                  {"pr", set.percent_rank},  {"k", cfg.k},         {"fold_seed", cfg.fold_seed},
                  {"learner", to_json(cfg.learner)}};
  if (!opt.baseline.empty()) config["baseline"] = opt.baseline;
  const auto manifest = base_manifest("evaluate", config, learner_seeds(cfg.learner), ws.hashes(input_files));
  const auto dir = ws.run_dir(id);
  const std::vector<fs::path> outputs{dir / "evaluation.csv", dir / "evaluation.txt", dir / "folds.csv"};
  if (skip_if_current(outputs, manifest, cfg, ws, log)) return;

  const auto folds = grouped_stratified_kfold(table.question_ids, table.labels, cfg.k, cfg.fold_seed);
  auto eval = evaluate_groups(table, set, cfg.learner, folds, cfg.k);
  auto& report = eval.report;
  if (!baseline_auc.empty()) {
    report.versus_baseline = paired_t_test(report.fold_auc, baseline_auc);
    report.baseline_id = opt.baseline;
  }
  {
    auto out = open_output(dir / "evaluation.csv");
    write_manifest_line(out, manifest);
    report.write_csv(out);
  }
  std::ostringstream text;
  text << "run " << id << ": " << set.label() << " with " << to_string(cfg.learner.classifier) << ", " << cfg.k
       << "-fold grouped CV\n";
  for (std::size_t f = 0; f < report.fold_auc.size(); ++f) {
    text << "  fold " << f << "  AUC " << fixed3(report.fold_auc[f]) << '\n';
  }
  text << "  mean AUC " << fixed3(report.mean) << " (sd " << fixed3(report.stddev) << ")\n";
  if (report.versus_baseline) {
    std::ostringstream p;
    p << std::setprecision(4) << report.versus_baseline->p;
    text << "  vs " << opt.baseline << ": t = " << fixed3(report.versus_baseline->t) << ", df = "
         << report.versus_baseline->df << ", p = " << p.str() << '\n';
  }
  {
    auto out = open_output(dir / "evaluation.txt");
    write_manifest_line(out, manifest);
    out << text.str();
  }
  {
    auto out = open_output(dir / "folds.csv");
    write_manifest_line(out, manifest);
    out << "question_id,answer_id,fold\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
      out << table.question_ids[r] << ',' << table.answer_ids[r] << ',' << folds[r] << '\n';
    }
  }
  log << text.str();
}

void run_select(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  check_k(cfg.k);
  const auto set = parse_group_set(cfg.groups, cfg.percent_rank);
  const auto id = opt.run_id.empty() ? "select_" + to_string(cfg.learner.classifier) : opt.run_id;
  check_run_id(id);
  const auto table = load_features(ws, set);
  Manifest config{{"groups", group_list(set)}, {"pr", set.percent_rank}, {"k", cfg.k}, {"fold_seed", cfg.fold_seed},
                  {"learner", to_json(cfg.learner)}};
  const auto manifest = base_manifest("select", config, learner_seeds(cfg.learner), ws.hashes({ws.features_csv()}));
  const auto dir = ws.run_dir(id);
  const std::vector<fs::path> outputs{dir / "trace.csv", dir / "trace.txt"};
  if (skip_if_current(outputs, manifest, cfg, ws, log)) return;

  const auto folds = grouped_stratified_kfold(table.question_ids, table.labels, cfg.k, cfg.fold_seed);
  const auto trace = greedy_select(table, set.groups, set.percent_rank, cfg.learner, folds, cfg.k);
  {
    auto out = open_output(dir / "trace.csv");
    write_manifest_line(out, manifest);
    trace.write_csv(out);
  }
  std::ostringstream text;
  text << "greedy selection with " << to_string(cfg.learner.classifier) << ", " << cfg.k << "-fold grouped CV\n";
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const auto& step = trace.steps[s];
    text << "  step " << s + 1 << ": +" << group_name(step.added) << " -> " << step.set.label() << "  AUC "
         << fixed3(step.report.mean);
    if (step.vs_previous) {
      std::ostringstream p;
      p << std::setprecision(4) << step.vs_previous->p;
      text << "  (t = " << fixed3(step.vs_previous->t) << ", p = " << p.str() << ")";
    }
    text << '\n';
  }
  {
    auto out = open_output(dir / "trace.txt");
    write_manifest_line(out, manifest);
    out << text.str();
  }
  log << text.str();
}

void run_report(const Workspace& ws, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  if (opt.run_id.empty()) {
    // Feature sets x classifiers grid over every evaluate run.
    std::vector<fs::path> evals;
    if (fs::is_directory(ws.runs_dir())) {
      for (const auto& e : fs::directory_iterator(ws.runs_dir())) {
        if (fs::exists(e.path() / "evaluation.csv")) evals.push_back(e.path() / "evaluation.csv");
      }
    }
    if (evals.empty()) throw DataError("no evaluation runs under runs/: run `cqa evaluate` first");
    std::sort(evals.begin(), evals.end());
    std::vector<AucCell> cells;
    for (const auto& p : evals) {
      ws.require(p, "evaluate");
      const auto m = read_manifest(p);
      if (!m) throw DataError(p.string() + ": missing manifest");
      const auto& c = m->at("config");
      cells.push_back({c.at("key").get<std::string>(), c.at("group_count").get<int>(),
                       parse_classifier(c.at("learner").at("classifier").get<std::string>()), read_mean(p)});
    }
    const auto manifest = base_manifest("report", Manifest::object(), Manifest::object(), ws.hashes(evals));
    const std::vector<fs::path> outputs{ws.reports_dir() / "table.txt", ws.reports_dir() / "table.csv"};
    if (skip_if_current(outputs, manifest, cfg, ws, log)) return;
    const auto table = report_table(cells);
    std::ostringstream text;
    table.write_text(text);
    {
      auto out = open_output(outputs[0]);
      write_manifest_line(out, manifest);
      out << text.str();
    }
    auto out = open_output(outputs[1]);
    write_manifest_line(out, manifest);
    table.write_csv(out);
    log << text.str();
    return;
  }

  // Importance of a GBDT trained on all instances with the run's feature set.
  check_run_id(opt.run_id);
  const auto dir = ws.run_dir(opt.run_id);
  const auto eval_path = dir / "evaluation.csv";
  if (!fs::exists(eval_path)) throw DataError("run " + opt.run_id + " not found: run `cqa evaluate` first");
  ws.require(eval_path, "evaluate");
  const auto em = read_manifest(eval_path);
  if (!em) throw DataError(eval_path.string() + ": missing manifest");
  const auto& rc = em->at("config");
  const auto set = parse_group_set(rc.at("groups").get<std::string>(), rc.at("pr").get<bool>());
  TrainConfig gbdt = cfg.learner.gbdt;
  const auto& learner = rc.at("learner");
  if (learner.contains("gbdt")) gbdt = train_config_from_json(learner.at("gbdt"));
  const Manifest config{{"run_id", opt.run_id}, {"top", opt.top}, {"gbdt", to_json(gbdt)}};
  const auto manifest =
      base_manifest("report", config, Manifest{{"gbdt", gbdt.seed}}, ws.hashes({eval_path, ws.features_csv()}));
  const std::vector<fs::path> outputs{dir / "importance.txt", dir / "importance.csv", dir / "model.txt"};
  if (skip_if_current(outputs, manifest, cfg, ws, log)) return;

  const auto table = load_features(ws, set);
  const auto cols = table.column_indices(set);
  const auto model = train_gbdt(table.select(cols), table.labels, gbdt, table.column_names(cols));
  model.save(dir / "model.txt", manifest);
  const auto rows = report_importance(model, opt.top);
  std::ostringstream text;
  write_importance_text(text, rows);
  {
    auto out = open_output(dir / "importance.txt");
    write_manifest_line(out, manifest);
    out << text.str();
  }
  {
    auto out = open_output(dir / "importance.csv");
    write_manifest_line(out, manifest);
    write_importance_csv(out, rows);
  }
  {
    // SVG cannot start with '#', so the manifest goes in a comment after the root element opens.
    std::ostringstream svg;
    write_importance_svg(svg, rows);
    auto doc = svg.str();
    const auto close = doc.find('>');
    auto out = open_output(dir / "importance.svg");
    out << doc.substr(0, close + 1) << "\n<!-- manifest " << manifest.dump() << " -->" << doc.substr(close + 1);
  }
  log << text.str();
}

}  // namespace cqa::cli
