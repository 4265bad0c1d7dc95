#include "repo_vitality/table.hpp"

#include <map>

#include "repo_vitality/csv.hpp"
#include "repo_vitality/error.hpp"

namespace rv {

Eigen::Index FeatureTable::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<Eigen::Index>(j);
  throw Error(ErrorKind::missing_feature, "no column '" + std::string(name) + "'");
}

FeatureTable make_table(const std::vector<DataPointVector>& vectors) {
  FeatureTable t;
  if (vectors.empty()) return t;
  t.columns = vectors.front().names;
  t.values.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (v.names != t.columns)
      throw Error(ErrorKind::inconsistent_inputs, v.repo_id + " has a different data-point layout");
    t.row_ids.push_back(v.repo_id);
    for (std::size_t j = 0; j < v.values.size(); ++j)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.values[j];
  }
  return t;
}

FeatureTable select_columns(const FeatureTable& table, const std::vector<std::string>& names) {
  FeatureTable out;
  out.row_ids = table.row_ids;
  out.columns = names;
  out.values.resize(table.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j)
    out.values.col(static_cast<Eigen::Index>(j)) = table.values.col(table.column_index(names[j]));
  return out;
}

FeatureTable select_rows(const FeatureTable& table, const std::vector<Eigen::Index>& rows) {
  FeatureTable out;
  out.columns = table.columns;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), table.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row_ids.push_back(table.row_ids[static_cast<std::size_t>(rows[i])]);
    out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(rows[i]);
  }
  return out;
}

void write_table(const FeatureTable& table, const std::filesystem::path& path) {
  std::vector<csv::Row> rows;
  csv::Row header{"repo_id"};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  rows.push_back(std::move(header));
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    csv::Row r{table.row_ids[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < table.cols(); ++j) r.push_back(csv::format_number(table.values(i, j)));
    rows.push_back(std::move(r));
  }
  csv::write_file(path, rows);
}

FeatureTable read_table(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().empty() || rows.front().front() != "repo_id")
    throw Error(ErrorKind::parse_error, path.string() + ": header must start with repo_id");
  FeatureTable t;
  t.columns.assign(rows.front().begin() + 1, rows.front().end());
  t.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != t.columns.size() + 1)
      throw Error(ErrorKind::parse_error, path.string() + ": record " + std::to_string(i + 1) + " has " +
                                              std::to_string(r.size()) + " fields, expected " +
                                              std::to_string(t.columns.size() + 1));
    t.row_ids.push_back(r[0]);
    for (std::size_t j = 1; j < r.size(); ++j)
      t.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = csv::parse_number(r[j]);
  }
  return t;
}

TrainingSet join_labels(const FeatureTable& table, const std::vector<LabeledProject>& labels) {
  std::map<std::string, Label, std::less<>> by_id;
  for (const auto& l : labels) by_id[l.repo_id] = l.label;
  TrainingSet out;
  out.columns = table.columns;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < table.row_ids.size(); ++i) {
    auto it = by_id.find(table.row_ids[i]);
    if (it == by_id.end()) continue;
    rows.push_back(static_cast<Eigen::Index>(i));
    out.row_ids.push_back(table.row_ids[i]);
    out.y.push_back(it->second);
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()), table.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.X.row(static_cast<Eigen::Index>(k)) = table.values.row(rows[k]);
  return out;
}

std::optional<ScenarioConfig> infer_scenario(const std::vector<std::string>& names) {
  int length = 0, interval = 0;
  for (const auto& name : names) {
    const auto id = parse_data_point_name(name);
    if (!id) return std::nullopt;
    const int m = id->last_month - id->first_month + 1;
    if (m <= 0 || (interval != 0 && m != interval)) return std::nullopt;
    interval = m;
    length = std::max(length, id->last_month);
  }
  if (interval == 0) return std::nullopt;
  return ScenarioConfig{length, interval};
}

}  // namespace rv
