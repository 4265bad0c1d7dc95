#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repo_vitality/dataset.hpp"
#include "repo_vitality/features.hpp"
#include "repo_vitality/table.hpp"

namespace rv {

/// A model-layout feature row; accepts rows of column-major matrices without copying.
using RowRef = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

struct ForestParams {
  int n_trees{100};
  std::optional<int> mtry;  // default floor(sqrt(#features))
  int min_leaf{1};
  std::optional<int> max_depth;
  std::uint64_t seed{0};
  /// false grows every tree on the identity sample (no OOB rows); used for single-tree checks.
  bool bootstrap{true};

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Binary tree in a flat node array; node 0 is the root.
struct DecisionTree {
  struct Node {
    int feature{-1};  // -1 marks a leaf
    double threshold{0.0};  // go left when x[feature] <= threshold
    int left{-1};
    int right{-1};
    std::array<int, 2> counts{};  // training rows per class, indexed by Label

    bool is_leaf() const { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;

  /// Leaf majority class; a tied leaf votes unmaintained.
  Label predict(RowRef x) const;
  const Node& leaf_for(RowRef x) const;
  bool uses_feature(int feature) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::size_t>> oob_indices;  // ascending, per tree
  ForestParams params;
  std::optional<ScenarioConfig> scenario;  // scenario the data points were extracted under
  static constexpr std::array<Label, 2> class_order{Label::unmaintained, Label::active};

  int n_trees() const { return static_cast<int>(trees.size()); }
  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Throws Error(empty_input), Error(single_class_input), Error(inconsistent_inputs) or
/// Error(invalid_params). Trees are grown on `threads` workers with identical results for any count.
ForestModel train(const Eigen::MatrixXd& X, std::span<const Label> y, std::vector<std::string> feature_names,
                  const ForestParams& params, unsigned threads = 1);

/// Grows one tree on the given sample (row indices into X, repeats allowed).
DecisionTree grow_tree(const Eigen::MatrixXd& X, std::span<const Label> y, std::span<const std::size_t> sample,
                       int mtry, int min_leaf, std::optional<int> max_depth, std::uint64_t seed);

/// Number of trees voting active for a row laid out like model.feature_names.
int active_votes(const ForestModel& model, RowRef x);
double predict_proba(const ForestModel& model, RowRef x);
/// Throws Error(missing_feature) naming the first absent data point.
double predict_proba(const ForestModel& model, const DataPointVector& x);
/// Active iff p >= 0.5.
Label predict_label(const ForestModel& model, const DataPointVector& x);
Label label_for_proba(double p_active);

/// Reorders a vector into the model's feature layout.
Eigen::RowVectorXd model_row(const ForestModel& model, const DataPointVector& x);

struct ImportanceRow {
  std::string name;
  double mda{0.0};
};
using ImportanceTable = std::vector<ImportanceRow>;

/// Out-of-bag permutation importance in percentage points of accuracy, one row per model feature in
/// model order. X must be the training matrix. Throws Error(no_oob) when no tree has OOB rows.
ImportanceTable mda_importance(const ForestModel& model, const Eigen::MatrixXd& X, std::span<const Label> y,
                               int repeats = 10, unsigned threads = 1);

std::string serialize_model(const ForestModel& model);
ForestModel deserialize_model(std::string_view text);
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace rv
