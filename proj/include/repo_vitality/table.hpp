#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repo_vitality/dataset.hpp"
#include "repo_vitality/features.hpp"

namespace rv {

/// Rows are projects, columns are named data points.
struct FeatureTable {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  /// Throws Error(missing_feature).
  Eigen::Index column_index(std::string_view name) const;
};

/// All vectors must share the same names (same scenario); throws Error(inconsistent_inputs).
FeatureTable make_table(const std::vector<DataPointVector>& vectors);

/// Keeps `names` in the given order; throws Error(missing_feature).
FeatureTable select_columns(const FeatureTable& table, const std::vector<std::string>& names);
FeatureTable select_rows(const FeatureTable& table, const std::vector<Eigen::Index>& rows);

/// First column is "repo_id", the rest are data points.
void write_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable read_table(const std::filesystem::path& path);

/// Labeled rows of a feature table, in table order. Unlabeled rows are dropped.
struct TrainingSet {
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  Eigen::MatrixXd X;
  std::vector<Label> y;
};

TrainingSet join_labels(const FeatureTable& table, const std::vector<LabeledProject>& labels);

/// Recovers (n, m) from "<feature>@T_{a,b}" column names; nullopt when the names do not follow the
/// scheme or disagree on the interval.
std::optional<ScenarioConfig> infer_scenario(const std::vector<std::string>& names);

}  // namespace rv
