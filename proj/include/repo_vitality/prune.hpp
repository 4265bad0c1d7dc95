#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "repo_vitality/table.hpp"

namespace rv {

struct CorrelationMatrix {
  Eigen::MatrixXd rho;         // symmetric, unit diagonal, Spearman
  std::vector<bool> constant;  // zero-variance columns; their off-diagonal entries are 0
};

/// Throws Error(too_few_rows) for fewer than two rows.
CorrelationMatrix correlation_matrix(const FeatureTable& table, unsigned threads = 1);

struct Cluster {
  std::vector<std::string> members;  // canonical order
  std::string representative;
};

struct CorrelationReport {
  double threshold{0.7};
  std::vector<Cluster> clusters;
  std::vector<std::string> kept;
  std::vector<std::string> removed;
};

/// Complete-linkage agglomeration on 1-|rho|, cut at 1-threshold. Every pair inside a cluster has
/// |rho| >= threshold. The representative is the member that comes first in `names`.
CorrelationReport cluster_and_select(const Eigen::MatrixXd& rho, const std::vector<std::string>& names,
                                     double threshold = 0.7);

/// correlation_matrix + cluster_and_select over the table's columns.
CorrelationReport prune(const FeatureTable& table, double threshold = 0.7, unsigned threads = 1);

void write_report_json(const CorrelationReport& report, const std::filesystem::path& path);

}  // namespace rv
