#include "repo_vitality/report.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "repo_vitality/error.hpp"
#include "repo_vitality/lma.hpp"
#include "repo_vitality/parallel.hpp"

namespace rv {

double days_since_last_commit(const ProjectSnapshot& s, Timestamp as_of) {
  const auto last = last_commit(s);
  if (!last) throw Error(ErrorKind::no_commits, s.repo_id + " has no commits");
  return days_between(*last, as_of);
}

std::vector<std::string> core_contributors(const ProjectSnapshot& s) {
  std::map<std::string, long> per_author;
  long total = 0;
  for (const auto& e : s.events) {
    if (e.kind != EventKind::commit) continue;
    ++per_author[e.actor];
    ++total;
  }
  if (total == 0) throw Error(ErrorKind::no_commits, s.repo_id + " has no commits");
  std::vector<std::pair<std::string, long>> ranked(per_author.begin(), per_author.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  long covered = 0;
  for (const auto& [author, count] : ranked) {
    out.push_back(author);
    covered += count;
    if (5 * covered >= 4 * total) break;  // covered / total >= 0.8, exactly
  }
  return out;
}

SpearmanTest<double> correlate(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw Error(ErrorKind::length_mismatch, std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
  return spearman_test(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                       Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
}

namespace {

void write_table(const ReportTable& t, const std::filesystem::path& path) {
  std::vector<csv::Row> rows{t.header};
  rows.insert(rows.end(), t.rows.begin(), t.rows.end());
  csv::write_file(path, rows);
}

std::string fmt(double v) { return csv::format_number(v); }

}  // namespace

ReportBundle emit_report(const ForestModel& model, const std::vector<ProjectSnapshot>& snapshots,
                         const std::filesystem::path& out_dir, const ReportOptions& options) {
  const auto scenario = options.scenario ? options.scenario : model.scenario;
  if (!scenario) throw Error(ErrorKind::invalid_scenario, "model carries no scenario; pass one explicitly");

  struct Row {
    const ProjectSnapshot* snap;
    LmaScore score;
    double days;
  };
  std::vector<Row> rows(snapshots.size());
  parallel_for(snapshots.size(), options.threads, [&](std::size_t i) {
    const auto& s = snapshots[i];
    rows[i].snap = &s;
    rows[i].score = score_vector(model, extract_vector(s, *scenario));
    rows[i].days = days_since_last_commit(s, options.as_of.value_or(s.as_of));
  });

  ReportBundle bundle;

  auto& dist = bundle.tables["lma_distribution"];
  dist.header = {"repo_id", "p_active", "lma"};
  std::vector<double> lmas;
  for (const auto& r : rows) {
    if (!r.score.lma) continue;
    dist.rows.push_back({r.snap->repo_id, fmt(r.score.p_active), fmt(*r.score.lma)});
    lmas.push_back(*r.score.lma);
  }

  auto& dslc = bundle.tables["days_since_last_commit"];
  dslc.header = {"repo_id", "label", "days_since_last_commit"};
  std::vector<double> unmaintained_days;
  for (const auto& r : rows) {
    const Label l = label_for_proba(r.score.p_active);
    dslc.rows.push_back({r.snap->repo_id, std::string(to_string(l)), fmt(r.days)});
    if (l == Label::unmaintained) unmaintained_days.push_back(r.days);
  }

  // Highest and lowest LMA projects, ties by repo_id.
  std::vector<const Row*> scored;
  for (const auto& r : rows)
    if (r.score.lma) scored.push_back(&r);
  std::sort(scored.begin(), scored.end(), [](const Row* a, const Row* b) {
    if (*a->score.lma != *b->score.lma) return *a->score.lma > *b->score.lma;
    return a->snap->repo_id < b->snap->repo_id;
  });
  const std::size_t top = std::min(options.series_projects, scored.size());
  const std::size_t bottom = std::min(options.series_projects, scored.size() - top);

  auto& series = bundle.tables["activity_series"];
  const ScenarioConfig series_scenario{24, 3};
  const std::array<std::pair<const char*, Feature>, 4> series_metrics = {{
      {"commits", Feature::commits},
      {"issues", Feature::open_issues},
      {"pull_requests", Feature::open_pull_requests},
      {"forks", Feature::forks},
  }};
  series.header = {"repo_id", "group", "lma"};
  {
    const auto labels = windows(series_scenario, Timestamp{});
    for (const auto& [name, f] : series_metrics)
      for (const auto& w : labels) series.header.push_back(std::string(name) + "@" + w.label);
  }
  const auto add_series = [&](const Row* r, const char* group) {
    csv::Row row{r->snap->repo_id, group, fmt(*r->score.lma)};
    const auto wins = windows(series_scenario, *last_commit(*r->snap));
    for (const auto& [name, f] : series_metrics)
      for (const auto& w : wins) row.push_back(fmt(extract_feature(*r->snap, f, w)));
    series.rows.push_back(std::move(row));
  };
  for (std::size_t i = 0; i < top; ++i) add_series(scored[i], "top");
  for (std::size_t i = scored.size() - bottom; i < scored.size(); ++i) add_series(scored[i], "bottom");

  auto& corr = bundle.tables["lma_correlations"];
  corr.header = {"variable", "rho", "p_value", "n", "degenerate"};
  std::map<std::string, std::vector<double>> covariates;
  for (const Row* r : scored) {
    const auto& s = *r->snap;
    std::set<std::string> authors;
    for (const auto& e : s.events)
      if (e.kind == EventKind::commit) authors.insert(e.actor);
    covariates["stars"].push_back(static_cast<double>(s.stars));
    covariates["contributors"].push_back(static_cast<double>(authors.size()));
    covariates["core_contributors"].push_back(static_cast<double>(core_contributors(s).size()));
    covariates["size_loc"].push_back(static_cast<double>(s.size_loc));
  }
  std::vector<double> scored_lma;
  for (const Row* r : scored) scored_lma.push_back(*r->score.lma);
  for (const char* var : {"stars", "contributors", "core_contributors", "size_loc"}) {
    const auto& xs = covariates[var];
    csv::Row row{var};
    try {
      const auto t = correlate(scored_lma, xs);
      row.insert(row.end(), {fmt(t.rho), fmt(t.p_value), std::to_string(xs.size()), "false"});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_input && e.kind() != ErrorKind::length_mismatch) throw;
      row.insert(row.end(), {"", "", std::to_string(xs.size()), "true"});
    }
    corr.rows.push_back(std::move(row));
  }

  auto& sum = bundle.summary;
  sum["projects"] = static_cast<double>(rows.size());
  sum["predicted_active"] = static_cast<double>(lmas.size());
  sum["predicted_unmaintained"] = static_cast<double>(unmaintained_days.size());
  const auto lma_summary = summarize_lma(lmas);
  if (lma_summary.count) {
    sum["lma_q1"] = *lma_summary.q1;
    sum["lma_q2"] = *lma_summary.q2;
    sum["lma_q3"] = *lma_summary.q3;
  }
  sum["lma_count_100"] = static_cast<double>(lma_summary.count_max);
  if (!unmaintained_days.empty()) {
    sum["unmaintained_days_q1"] = quantile(unmaintained_days, 0.25);
    sum["unmaintained_days_q2"] = quantile(unmaintained_days, 0.50);
    sum["unmaintained_days_q3"] = quantile(unmaintained_days, 0.75);
    const auto recent = std::count_if(unmaintained_days.begin(), unmaintained_days.end(), [](double d) { return d < 365.0; });
    sum["unmaintained_recent_commit_fraction"] = static_cast<double>(recent) / static_cast<double>(unmaintained_days.size());
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, table] : bundle.tables) write_table(table, out_dir / (name + ".csv"));
    ReportTable summary_table{{"name", "value"}, {}};
    for (const auto& [name, value] : sum) summary_table.rows.push_back({name, fmt(value)});
    write_table(summary_table, out_dir / "summary.csv");
  }
  return bundle;
}

}  // namespace rv
