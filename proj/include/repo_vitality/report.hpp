#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repo_vitality/csv.hpp"
#include "repo_vitality/forest.hpp"
#include "repo_vitality/snapshot.hpp"
#include "repo_vitality/stats.hpp"

namespace rv {

/// Throws Error(no_commits).
double days_since_last_commit(const ProjectSnapshot& s, Timestamp as_of);

/// Minimal prefix of authors (by commit count desc, then id) covering >= 80% of commits.
/// Throws Error(no_commits).
std::vector<std::string> core_contributors(const ProjectSnapshot& s);

/// Tie-corrected Spearman rho with a t-approximation p-value.
SpearmanTest<double> correlate(const std::vector<double>& xs, const std::vector<double>& ys);

struct ReportTable {
  csv::Row header;
  std::vector<csv::Row> rows;
};

struct ReportBundle {
  std::map<std::string, ReportTable> tables;
  std::map<std::string, double> summary;
};

struct ReportOptions {
  std::optional<Timestamp> as_of;  // default: each snapshot's own as_of
  std::optional<ScenarioConfig> scenario;  // default: the model's
  std::size_t series_projects{10};  // top and bottom LMA projects in activity_series
  unsigned threads{1};
};

/// Builds lma_distribution, days_since_last_commit, activity_series and lma_correlations plus a
/// summary; writes `<name>.csv` for each and summary.csv when `out_dir` is non-empty.
ReportBundle emit_report(const ForestModel& model, const std::vector<ProjectSnapshot>& snapshots,
                         const std::filesystem::path& out_dir, const ReportOptions& options = {});

}  // namespace rv
