#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "repo_vitality/csv.hpp"
#include "repo_vitality/dataset.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/eval.hpp"
#include "repo_vitality/features.hpp"
#include "repo_vitality/forest.hpp"
#include "repo_vitality/github_client.hpp"
#include "repo_vitality/lma.hpp"
#include "repo_vitality/prune.hpp"
#include "repo_vitality/readme_scan.hpp"
#include "repo_vitality/report.hpp"
#include "repo_vitality/synth.hpp"
#include "repo_vitality/table.hpp"

namespace rv::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed{0};
  bool verbose{false};
  unsigned threads{1};
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path output_dir_of(const fs::path& file) {
  const auto parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

void ensure_parent(const fs::path& file) {
  if (const auto parent = file.parent_path(); !parent.empty()) fs::create_directories(parent);
}

std::optional<ScenarioConfig> optional_scenario(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_scenario(text);
}

std::set<std::string> read_declared(const std::string& path) {
  std::set<std::string> out;
  if (path.empty()) return out;
  for (auto& line : read_sentence_file(path)) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    out.insert(line);
  }
  return out;
}

ForestParams forest_params(int trees, int mtry, int min_leaf, int max_depth, std::uint64_t seed) {
  ForestParams p;
  p.n_trees = trees;
  if (mtry > 0) p.mtry = mtry;
  p.min_leaf = min_leaf;
  if (max_depth >= 0) p.max_depth = max_depth;
  p.seed = seed;
  return p;
}

struct ForestFlags {
  int trees{100};
  int mtry{0};
  int min_leaf{1};
  int max_depth{-1};

  void add_to(CLI::App* sub) {
    sub->add_option("--trees", trees, "Number of trees")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--mtry", mtry, "Features tried per split (0 = floor(sqrt(#features)))")->capture_default_str();
    sub->add_option("--min-leaf", min_leaf, "Minimum rows per leaf")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", max_depth, "Maximum depth (-1 = unlimited)")->capture_default_str();
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify repositories as unmaintained or under maintenance from windowed activity", "repo-vitality"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a TOML file (command-line flags win)");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for all randomness")->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Progress output on stderr");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on this)")->capture_default_str();

  std::function<void()> action;
  fs::path echo_dir;
  CLI::App* active = nullptr;
  const auto on = [&](CLI::App* sub, std::function<void()> fn) {
    sub->configurable();
    sub->callback([&, sub, fn] {
      active = sub;
      action = fn;
    });
  };
  const auto log = [&](const std::string& msg) {
    if (g.verbose) err << msg << '\n';
  };

  // ingest
  struct {
    std::string repo, as_of, out, token_env{"RV_TOKEN"};
    int parallelism{4}, max_retries{5};
    bool repo_local_owner{false};
  } ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Fetch one repository's history into a snapshot file");
  s_ingest->add_option("--repo", ingest.repo, "owner/name")->required();
  s_ingest->add_option("--as-of", ingest.as_of, "Capture instant (ISO-8601, UTC)")->required();
  s_ingest->add_option("--out", ingest.out, "Snapshot directory")->required();
  s_ingest->add_option("--token-env", ingest.token_env, "Environment variable holding the API token")->capture_default_str();
  s_ingest->add_option("--parallelism", ingest.parallelism, "Concurrent API requests")->capture_default_str();
  s_ingest->add_option("--max-retries", ingest.max_retries, "Retries per request on rate limiting")->capture_default_str();
  s_ingest->add_flag("--repo-local-owner", ingest.repo_local_owner, "Count only the owner's commits in this repository");
  on(s_ingest, [&] {
    const char* token = std::getenv(ingest.token_env.c_str());
    if (!token || !*token) throw Error(ErrorKind::auth_failure, "environment variable " + ingest.token_env + " is not set");
    FetchOptions opts;
    opts.token = token;
    opts.as_of = parse_timestamp(ingest.as_of);
    opts.parallelism = ingest.parallelism;
    opts.max_retries = ingest.max_retries;
    opts.owner_wide = !ingest.repo_local_owner;
    auto transport = make_https_transport();
    GithubClient client(*transport, opts);
    const auto snap = client.fetch_snapshot(ingest.repo);
    fs::create_directories(ingest.out);
    const auto path = fs::path(ingest.out) / snapshot_file_name(snap.repo_id);
    store_snapshot(snap, path);
    out << path.string() << '\n';
    echo_dir = ingest.out;
  });

  // curate
  struct {
    std::string snapshots, declared, out;
    CurationRules rules;
  } cur;
  auto* s_curate = app.add_subcommand("curate", "Apply curation filters and label the corpus");
  s_curate->add_option("--snapshots", cur.snapshots, "Snapshot directory")->required();
  s_curate->add_option("--declared", cur.declared, "File of repo ids declared unmaintained, one per line");
  s_curate->add_option("--out", cur.out, "labels.csv")->required();
  s_curate->add_option("--min-history-days", cur.rules.min_history_days)->capture_default_str();
  s_curate->add_option("--min-loc", cur.rules.min_loc)->capture_default_str();
  s_curate->add_option("--exclude-topic", cur.rules.excluded_topics)->capture_default_str();
  s_curate->add_option("--release-window-days", cur.rules.active_release_window_days)->capture_default_str();
  on(s_curate, [&] {
    const auto pool = load_snapshot_dir(cur.snapshots);
    const auto declared = read_declared(cur.declared);
    const auto result = curate(pool, cur.rules);
    std::vector<LabeledProject> labels;
    std::vector<csv::Row> report{{"repo_id", "status", "detail"}};
    std::vector<std::string> status(pool.size());
    for (const auto& r : result.rejected)
      report.push_back({pool[r.index].repo_id, "rejected:" + std::string(to_string(r.reason)), r.detail});
    for (auto i : result.kept) {
      try {
        if (auto l = label(pool[i], cur.rules, declared)) {
          labels.push_back(*l);
          report.push_back({pool[i].repo_id, "labeled:" + std::string(to_string(l->label)), std::string(to_string(l->label_source))});
        } else {
          report.push_back({pool[i].repo_id, "unlabeled", ""});
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::label_conflict) throw;
        err << e.what() << '\n';
        report.push_back({pool[i].repo_id, "conflict", e.what()});
      }
    }
    ensure_parent(cur.out);
    write_labels_csv(labels, cur.out);
    csv::write_file(output_dir_of(cur.out) / "curation_report.csv", report);
    log("kept " + std::to_string(result.kept.size()) + " of " + std::to_string(pool.size()));
    echo_dir = output_dir_of(cur.out);
  });

  // extract
  struct {
    std::string scenario{"8"}, snapshots, out;
  } ext;
  auto* s_extract = app.add_subcommand("extract", "Compute windowed data points for every snapshot");
  s_extract->add_option("--scenario", ext.scenario, "1..10 or n,m (months)")->capture_default_str();
  s_extract->add_option("--snapshots", ext.snapshots, "Snapshot directory")->required();
  s_extract->add_option("--out", ext.out, "features.csv")->required();
  on(s_extract, [&] {
    const auto sc = parse_scenario(ext.scenario);
    const auto snaps = load_snapshot_dir(ext.snapshots);
    std::vector<DataPointVector> vectors;
    for (const auto& s : snaps) {
      try {
        vectors.push_back(extract_vector(s, sc));
        if (vectors.back().short_history) log(s.repo_id + ": history shorter than the collection span");
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::no_commits) throw;
        err << "skipping " << e.what() << '\n';
      }
    }
    auto table = make_table(vectors);
    if (vectors.empty()) {
      for (const auto& f : all_features())
        for (const auto& w : windows(sc, Timestamp{})) table.columns.push_back(data_point_name(f, w));
    }
    ensure_parent(ext.out);
    write_table(table, ext.out);
    echo_dir = output_dir_of(ext.out);
  });

  // prune
  struct {
    std::string in, out, report;
    double threshold{0.7};
  } pr;
  auto* s_prune = app.add_subcommand("prune", "Drop correlated data points, one representative per cluster");
  s_prune->add_option("--in", pr.in, "features.csv")->required();
  s_prune->add_option("--threshold", pr.threshold, "Minimum |rho| inside a cluster")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  s_prune->add_option("--out", pr.out, "pruned.csv")->required();
  s_prune->add_option("--report", pr.report, "clusters.json")->required();
  on(s_prune, [&] {
    const auto table = read_table(pr.in);
    const auto report = prune(table, pr.threshold, g.threads);
    ensure_parent(pr.out);
    ensure_parent(pr.report);
    write_table(select_columns(table, report.kept), pr.out);
    write_report_json(report, pr.report);
    log("removed " + std::to_string(report.removed.size()) + " of " + std::to_string(table.columns.size()) + " data points");
    echo_dir = output_dir_of(pr.out);
  });

  // train
  struct {
    std::string features, labels, out, scenario, importance;
    int repeats{10};
    ForestFlags forest;
  } tr;
  auto* s_train = app.add_subcommand("train", "Train a random forest on labeled rows");
  s_train->add_option("--features", tr.features, "pruned.csv")->required();
  s_train->add_option("--labels", tr.labels, "labels.csv")->required();
  s_train->add_option("--out", tr.out, "model.rvf")->required();
  s_train->add_option("--scenario", tr.scenario, "Scenario of the data points (default: inferred from column names)");
  s_train->add_option("--importance", tr.importance, "Also write out-of-bag MDA importance CSV here");
  s_train->add_option("--importance-repeats", tr.repeats, "Permutations per tree and feature")->capture_default_str();
  tr.forest.add_to(s_train);
  on(s_train, [&] {
    const auto table = read_table(tr.features);
    const auto data = join_labels(table, read_labels_csv(tr.labels));
    auto model = train(data.X, data.y, data.columns,
                       forest_params(tr.forest.trees, tr.forest.mtry, tr.forest.min_leaf, tr.forest.max_depth, g.seed), g.threads);
    model.scenario = tr.scenario.empty() ? infer_scenario(table.columns) : parse_scenario(tr.scenario);
    ensure_parent(tr.out);
    save_model(model, tr.out);
    if (!tr.importance.empty()) {
      auto imp = mda_importance(model, data.X, data.y, tr.repeats, g.threads);
      std::stable_sort(imp.begin(), imp.end(), [](const auto& a, const auto& b) { return a.mda > b.mda; });
      std::vector<csv::Row> rows{{"data_point", "mda"}};
      for (const auto& r : imp) rows.push_back({r.name, csv::format_number(r.mda)});
      ensure_parent(tr.importance);
      csv::write_file(tr.importance, rows);
    }
    echo_dir = output_dir_of(tr.out);
  });

  // evaluate
  struct {
    std::string features, labels, out, aggregation{"pooled"};
    int folds{5}, rounds{100};
    ForestFlags forest;
  } ev;
  auto* s_eval = app.add_subcommand("evaluate", "Repeated stratified k-fold evaluation against two baselines");
  s_eval->add_option("--features", ev.features, "pruned.csv")->required();
  s_eval->add_option("--labels", ev.labels, "labels.csv")->required();
  s_eval->add_option("--folds", ev.folds)->capture_default_str();
  s_eval->add_option("--rounds", ev.rounds)->capture_default_str();
  s_eval->add_option("--out", ev.out, "metrics.csv")->required();
  s_eval->add_option("--aggregation", ev.aggregation, "pooled | per-fold")->capture_default_str()->check(CLI::IsMember({"pooled", "per-fold"}));
  ev.forest.add_to(s_eval);
  on(s_eval, [&] {
    const auto data = join_labels(read_table(ev.features), read_labels_csv(ev.labels));
    ExperimentOptions opts;
    opts.folds = ev.folds;
    opts.rounds = ev.rounds;
    opts.seed = g.seed;
    opts.threads = g.threads;
    opts.aggregation = ev.aggregation == "pooled" ? Aggregation::pooled : Aggregation::per_fold;
    const auto result = run_experiment(data.X, data.y, forest_params(ev.forest.trees, ev.forest.mtry, ev.forest.min_leaf, ev.forest.max_depth, 0), opts);
    ensure_parent(ev.out);
    write_metrics_csv(result, ev.out);
    const auto& m = result.model.mean;
    out << "precision " << m.precision << " recall " << m.recall << " f_measure " << m.f_measure << " accuracy " << m.accuracy
        << " kappa " << m.kappa << " auc " << m.auc << '\n';
    echo_dir = output_dir_of(ev.out);
  });

  // predict
  struct {
    std::string model, snapshot, scenario, format{"json"}, out;
  } pd;
  auto* s_predict = app.add_subcommand("predict", "Classify one snapshot");
  s_predict->add_option("--model", pd.model, "model.rvf")->required();
  s_predict->add_option("--snapshot", pd.snapshot, "Snapshot file")->required();
  s_predict->add_option("--scenario", pd.scenario, "Override the model's scenario");
  s_predict->add_option("--format", pd.format)->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  s_predict->add_option("--out", pd.out, "Write the record here instead of stdout");
  on(s_predict, [&] {
    const auto model = load_model(pd.model);
    const auto sc = pd.scenario.empty() ? model.scenario : parse_scenario(pd.scenario);
    if (!sc) throw Error(ErrorKind::invalid_scenario, "model carries no scenario; pass --scenario");
    const auto snap = load_snapshot(pd.snapshot).snapshot;
    const auto score = score_vector(model, extract_vector(snap, *sc));
    const auto label = label_for_proba(score.p_active);
    std::string record;
    if (pd.format == "json") {
      nlohmann::ordered_json j;
      j["repo_id"] = score.repo_id;
      j["label"] = to_string(label);
      j["p_active"] = score.p_active;
      j["lma"] = score.lma ? nlohmann::ordered_json(*score.lma) : nlohmann::ordered_json(nullptr);
      record = j.dump() + "\n";
    } else {
      record = csv::format_row({"repo_id", "label", "p_active", "lma"}) +
               csv::format_row({score.repo_id, std::string(to_string(label)), csv::format_number(score.p_active),
                                score.lma ? csv::format_number(*score.lma) : ""});
    }
    if (pd.out.empty()) {
      out << record;
    } else {
      ensure_parent(pd.out);
      std::ofstream f(pd.out, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(ErrorKind::io_failure, "cannot write " + pd.out);
      f << record;
      echo_dir = output_dir_of(pd.out);
    }
  });

  // lma
  struct {
    std::string model, snapshots, out, scenario;
  } lm;
  auto* s_lma = app.add_subcommand("lma", "Score every snapshot with the Level of Maintenance Activity");
  s_lma->add_option("--model", lm.model, "model.rvf")->required();
  s_lma->add_option("--snapshots", lm.snapshots, "Snapshot directory")->required();
  s_lma->add_option("--out", lm.out, "lma.csv")->required();
  s_lma->add_option("--scenario", lm.scenario, "Override the model's scenario");
  on(s_lma, [&] {
    const auto model = load_model(lm.model);
    const auto sc = lm.scenario.empty() ? model.scenario : parse_scenario(lm.scenario);
    if (!sc) throw Error(ErrorKind::invalid_scenario, "model carries no scenario; pass --scenario");
    std::vector<DataPointVector> vectors;
    for (const auto& s : load_snapshot_dir(lm.snapshots)) vectors.push_back(extract_vector(s, *sc));
    const auto corpus = score_corpus(model, vectors, g.threads);
    std::vector<csv::Row> rows{{"repo_id", "label", "p_active", "lma"}};
    for (const auto& s : corpus.scores)
      rows.push_back({s.repo_id, std::string(to_string(label_for_proba(s.p_active))), csv::format_number(s.p_active),
                      s.lma ? csv::format_number(*s.lma) : ""});
    ensure_parent(lm.out);
    csv::write_file(lm.out, rows);
    const auto& sm = corpus.summary;
    out << "active " << sm.count;
    if (sm.count) out << " q1 " << *sm.q1 << " q2 " << *sm.q2 << " q3 " << *sm.q3;
    out << " lma_100 " << sm.count_max << '\n';
    echo_dir = output_dir_of(lm.out);
  });

  // scan-readme
  struct {
    std::string snapshots, sentences, out;
  } sr;
  auto* s_scan = app.add_subcommand("scan-readme", "Find self-declared unmaintained notices in READMEs");
  s_scan->add_option("--snapshots", sr.snapshots, "Snapshot directory")->required();
  s_scan->add_option("--sentences", sr.sentences, "Phrase file, one per line (default: built-in list)");
  s_scan->add_option("--out", sr.out, "ground_truth.csv")->required();
  on(s_scan, [&] {
    const auto sentences = sr.sentences.empty() ? default_sentences() : read_sentence_file(sr.sentences);
    if (sentences.empty()) throw Error(ErrorKind::invalid_params, "sentence list is empty");
    std::vector<csv::Row> rows{{"repo_id", "matched_sentence", "offset", "confirmed"}};
    for (const auto& s : load_snapshot_dir(sr.snapshots))
      for (const auto& m : scan(s.repo_id, s.readme_text, sentences).matched)
        rows.push_back({s.repo_id, m.sentence, std::to_string(m.offset), ""});
    ensure_parent(sr.out);
    csv::write_file(sr.out, rows);
    echo_dir = output_dir_of(sr.out);
  });

  // report
  struct {
    std::string model, snapshots, out, as_of, scenario;
  } rp;
  auto* s_report = app.add_subcommand("report", "Emit the analysis tables behind the LMA and recency figures");
  s_report->add_option("--model", rp.model, "model.rvf")->required();
  s_report->add_option("--snapshots", rp.snapshots, "Snapshot directory")->required();
  s_report->add_option("--out", rp.out, "Output directory")->required();
  s_report->add_option("--as-of", rp.as_of, "Reference date for days since last commit (default: each snapshot's as_of)");
  s_report->add_option("--scenario", rp.scenario, "Override the model's scenario");
  on(s_report, [&] {
    ReportOptions opts;
    if (!rp.as_of.empty()) opts.as_of = parse_timestamp(rp.as_of);
    opts.scenario = optional_scenario(rp.scenario);
    opts.threads = g.threads;
    emit_report(load_model(rp.model), load_snapshot_dir(rp.snapshots), rp.out, opts);
    echo_dir = rp.out;
  });

  // synth
  struct {
    std::string out, as_of;
    SynthParams params;
  } sy;
  auto* s_synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
  s_synth->add_option("--n", sy.params.n_projects, "Number of projects (>= 10)")->capture_default_str();
  s_synth->add_option("--prevalence", sy.params.prevalence, "Fraction unmaintained")->capture_default_str();
  s_synth->add_option("--out", sy.out, "Output directory")->required();
  s_synth->add_option("--as-of", sy.as_of, "Snapshot instant (default 2018-11-30)");
  s_synth->add_option("--decay-windows", sy.params.decay.decay_windows)->capture_default_str();
  s_synth->add_option("--decay-strength", sy.params.decay.decay_strength)->capture_default_str();
  s_synth->add_option("--floor-min", sy.params.decay.floor_min)->capture_default_str();
  s_synth->add_option("--floor-max", sy.params.decay.floor_max)->capture_default_str();
  s_synth->add_option("--idle-days-max", sy.params.decay.idle_days_max)->capture_default_str();
  on(s_synth, [&] {
    if (!sy.as_of.empty()) sy.params.as_of = parse_timestamp(sy.as_of);
    write_corpus(synth(sy.params, g.seed), sy.out);
    echo_dir = sy.out;
  });

  try {
    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    CLI::App* target = active ? active : &app;
    for (auto* sub : app.get_subcommands())
      target = sub;
    err << target->help();
    return 2;
  }

  try {
    action();
    if (!echo_dir.empty()) {
      fs::create_directories(echo_dir);
      std::ofstream cfg(echo_dir / ("run_config." + active->get_name() + ".toml"), std::ios::binary | std::ios::trunc);
      cfg << "seed=" << g.seed << "\nverbose=" << (g.verbose ? "true" : "false") << "\nthreads=" << g.threads << "\n[" << active->get_name()
          << "]\n"
          << active->config_to_str(true, false);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rv::cli
