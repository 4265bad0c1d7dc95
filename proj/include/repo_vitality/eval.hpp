#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "repo_vitality/dataset.hpp"
#include "repo_vitality/forest.hpp"

namespace rv {

/// Positive class = unmaintained.
struct ConfusionMatrix {
  std::int64_t tp{0}, fp{0}, fn{0}, tn{0};

  std::int64_t total() const { return tp + fp + fn + tn; }
  void add(Label truth, Label predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ScoredInstance {
  double p_unmaintained{0.0};
  Label truth{Label::unmaintained};
};

/// Which metrics hit a 0/0 (or p_e = 1) and were reported as 0.
enum DegenerateFlag : unsigned {
  degenerate_none = 0,
  degenerate_precision = 1u << 0,
  degenerate_recall = 1u << 1,
  degenerate_f_measure = 1u << 2,
  degenerate_kappa = 1u << 3,
  degenerate_auc = 1u << 4,
  degenerate_accuracy = 1u << 5,
};

struct MetricSet {
  double accuracy{0}, precision{0}, recall{0}, f_measure{0}, kappa{0}, auc{0};
  unsigned degenerate{degenerate_none};

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

/// Throws Error(inconsistent_inputs) when cm.total() differs from scores.size().
MetricSet compute_metrics(const ConfusionMatrix& cm, std::span<const ScoredInstance> scores);

/// Mann-Whitney AUC of p_unmaintained for unmaintained vs active; tied pairs count 1/2.
/// Sets `degenerate` and returns 0 when a class is absent.
double rank_auc(std::span<const ScoredInstance> scores, bool* degenerate = nullptr);

/// Folds partition [0, n); per-class counts differ by at most one across folds.
/// Throws Error(class_too_small) if a class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed);

struct Predictions {
  ConfusionMatrix cm;
  std::vector<ScoredInstance> scores;
};

Predictions predict_all_unmaintained(std::span<const Label> y_test);
/// Score ~ U(0,1), predicted unmaintained when score >= 0.5.
Predictions predict_random(std::span<const Label> y_test, std::uint64_t seed);
MetricSet baseline_all_unmaintained(std::span<const Label> y_test);
MetricSet baseline_random(std::span<const Label> y_test, std::uint64_t seed);

enum class Aggregation { pooled, per_fold };

struct ExperimentOptions {
  int folds{5};
  int rounds{100};
  std::uint64_t seed{0};
  Aggregation aggregation{Aggregation::pooled};
  unsigned threads{1};
};

struct RoundMetrics {
  MetricSet model, baseline1, baseline2;
};

struct MetricSummary {
  MetricSet mean;
  MetricSet stddev;  // sample standard deviation over rounds
};

struct ExperimentResult {
  std::vector<RoundMetrics> rounds;
  MetricSummary model, baseline1, baseline2;
};

/// Repeated stratified k-fold. `params.seed` is ignored; per-fold forest seeds derive from options.seed.
ExperimentResult run_experiment(const Eigen::MatrixXd& X, std::span<const Label> y, const ForestParams& params,
                                const ExperimentOptions& options);

MetricSummary summarize(const std::vector<MetricSet>& runs);

/// One row per round plus a MEAN row; six metrics each for model, baseline1, baseline2.
void write_metrics_csv(const ExperimentResult& result, const std::filesystem::path& path);

}  // namespace rv
