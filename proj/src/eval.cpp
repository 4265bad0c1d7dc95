#include "repo_vitality/eval.hpp"

#include <algorithm>
#include <cmath>

#include "repo_vitality/csv.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/parallel.hpp"
#include "repo_vitality/rng.hpp"
#include "repo_vitality/stats.hpp"

namespace rv {

void ConfusionMatrix::add(Label truth, Label predicted) {
  const bool pos_truth = truth == Label::unmaintained;
  const bool pos_pred = predicted == Label::unmaintained;
  if (pos_pred)
    (pos_truth ? tp : fp) += 1;
  else
    (pos_truth ? fn : tn) += 1;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

double rank_auc(std::span<const ScoredInstance> scores, bool* degenerate) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(scores.size()));
  double pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    s(static_cast<Eigen::Index>(i)) = scores[i].p_unmaintained;
    (scores[i].truth == Label::unmaintained ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const auto ranks = average_ranks(s);
  CompensatedSum<double> rank_sum;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i].truth == Label::unmaintained) rank_sum.add(ranks(static_cast<Eigen::Index>(i)));
  if (degenerate) *degenerate = false;
  return (rank_sum.value() - pos * (pos + 1) / 2.0) / (pos * neg);
}

MetricSet compute_metrics(const ConfusionMatrix& cm, std::span<const ScoredInstance> scores) {
  if (cm.total() != static_cast<std::int64_t>(scores.size()))
    throw Error(ErrorKind::inconsistent_inputs, "confusion matrix covers " + std::to_string(cm.total()) +
                                                    " instances but " + std::to_string(scores.size()) + " scores given");
  MetricSet m;
  const auto ratio = [&](std::int64_t num, std::int64_t den, unsigned flag) {
    if (den == 0) {
      m.degenerate |= flag;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const std::int64_t n = cm.total();
  m.accuracy = ratio(cm.tp + cm.tn, n, degenerate_accuracy);
  m.precision = ratio(cm.tp, cm.tp + cm.fp, degenerate_precision);
  m.recall = ratio(cm.tp, cm.tp + cm.fn, degenerate_recall);
  if (m.precision + m.recall > 0.0)
    m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else
    m.degenerate |= degenerate_f_measure;

  // kappa = (N*(tp+tn) - S) / (N^2 - S), S = sum of marginal products; exact in integers.
  const __int128 N = n;
  const __int128 S = static_cast<__int128>(cm.tp + cm.fp) * (cm.tp + cm.fn) + static_cast<__int128>(cm.fn + cm.tn) * (cm.fp + cm.tn);
  const __int128 num = N * (cm.tp + cm.tn) - S;
  const __int128 den = N * N - S;
  if (den == 0)
    m.degenerate |= degenerate_kappa;
  else
    m.kappa = static_cast<double>(num) / static_cast<double>(den);

  bool auc_degenerate = false;
  m.auc = rank_auc(scores, &auc_degenerate);
  if (auc_degenerate) m.degenerate |= degenerate_auc;
  return m;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::invalid_params, "k must be >= 2");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  for (std::size_t c = 0; c < 2; ++c)
    if (by_class[c].size() < static_cast<std::size_t>(k))
      throw Error(ErrorKind::class_too_small, std::string(to_string(static_cast<Label>(c))) + " has " +
                                                  std::to_string(by_class[c].size()) + " members, need >= " + std::to_string(k));
  Engine rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) folds[next++ % folds.size()].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

Predictions predict_all_unmaintained(std::span<const Label> y_test) {
  Predictions out;
  for (auto truth : y_test) {
    out.cm.add(truth, Label::unmaintained);
    out.scores.push_back({1.0, truth});
  }
  return out;
}

Predictions predict_random(std::span<const Label> y_test, std::uint64_t seed) {
  Engine rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Predictions out;
  for (auto truth : y_test) {
    const double score = u(rng);
    out.cm.add(truth, score >= 0.5 ? Label::unmaintained : Label::active);
    out.scores.push_back({score, truth});
  }
  return out;
}

MetricSet baseline_all_unmaintained(std::span<const Label> y_test) {
  if (y_test.empty()) throw Error(ErrorKind::empty_input, "empty test set");
  const auto p = predict_all_unmaintained(y_test);
  return compute_metrics(p.cm, p.scores);
}

MetricSet baseline_random(std::span<const Label> y_test, std::uint64_t seed) {
  if (y_test.empty()) throw Error(ErrorKind::empty_input, "empty test set");
  const auto p = predict_random(y_test, seed);
  return compute_metrics(p.cm, p.scores);
}

namespace {

MetricSet combine_mean(const std::vector<MetricSet>& runs) { return summarize(runs).mean; }

MetricSet aggregate(const std::vector<Predictions>& per_fold, Aggregation how) {
  if (how == Aggregation::pooled) {
    Predictions all;
    for (const auto& p : per_fold) {
      all.cm += p.cm;
      all.scores.insert(all.scores.end(), p.scores.begin(), p.scores.end());
    }
    return compute_metrics(all.cm, all.scores);
  }
  std::vector<MetricSet> fold_metrics;
  unsigned flags = 0;
  for (const auto& p : per_fold) {
    fold_metrics.push_back(compute_metrics(p.cm, p.scores));
    flags |= fold_metrics.back().degenerate;
  }
  auto m = combine_mean(fold_metrics);
  m.degenerate = flags;
  return m;
}

}  // namespace

MetricSummary summarize(const std::vector<MetricSet>& runs) {
  MetricSummary s;
  if (runs.empty()) return s;
  constexpr std::array fields = {&MetricSet::accuracy, &MetricSet::precision, &MetricSet::recall,
                                 &MetricSet::f_measure, &MetricSet::kappa, &MetricSet::auc};
  const double n = static_cast<double>(runs.size());
  for (auto field : fields) {
    CompensatedSum<double> sum;
    for (const auto& r : runs) sum.add(r.*field);
    const double mean = sum.value() / n;
    CompensatedSum<double> sq;
    for (const auto& r : runs) sq.add((r.*field - mean) * (r.*field - mean));
    s.mean.*field = mean;
    s.stddev.*field = runs.size() > 1 ? std::sqrt(sq.value() / (n - 1.0)) : 0.0;
  }
  for (const auto& r : runs) s.mean.degenerate |= r.degenerate;
  return s;
}

ExperimentResult run_experiment(const Eigen::MatrixXd& X, std::span<const Label> y, const ForestParams& params,
                                const ExperimentOptions& options) {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw Error(ErrorKind::inconsistent_inputs, "feature rows and labels differ in length");
  if (options.rounds < 1) throw Error(ErrorKind::invalid_params, "rounds must be >= 1");
  // Validates class sizes up front so worker threads never start on an impossible split.
  (void)stratified_kfold(y, options.folds, 0);

  ExperimentResult result;
  result.rounds.resize(static_cast<std::size_t>(options.rounds));
  std::vector<std::string> names(static_cast<std::size_t>(X.cols()));

  parallel_for(result.rounds.size(), options.threads, [&](std::size_t r) {
    const auto folds = stratified_kfold(y, options.folds, derive_seed(options.seed, {tag(Stream::fold), r}));
    std::vector<Predictions> model_preds, b1_preds, b2_preds;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<Eigen::Index> train_rows;
      std::vector<Label> train_y, test_y;
      std::vector<bool> in_test(y.size(), false);
      for (auto i : folds[f]) in_test[i] = true;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (in_test[i]) {
          test_y.push_back(y[i]);
        } else {
          train_rows.push_back(static_cast<Eigen::Index>(i));
          train_y.push_back(y[i]);
        }
      }
      Eigen::MatrixXd train_X(static_cast<Eigen::Index>(train_rows.size()), X.cols());
      for (std::size_t k = 0; k < train_rows.size(); ++k) train_X.row(static_cast<Eigen::Index>(k)) = X.row(train_rows[k]);

      ForestParams fp = params;
      fp.seed = derive_seed(options.seed, {tag(Stream::round), r, f});
      const auto model = train(train_X, train_y, names, fp, 1);

      Predictions mp;
      for (auto i : folds[f]) {
        const double p_active = predict_proba(model, X.row(static_cast<Eigen::Index>(i)));
        mp.cm.add(y[i], label_for_proba(p_active));
        mp.scores.push_back({1.0 - p_active, y[i]});
      }
      model_preds.push_back(std::move(mp));
      b1_preds.push_back(predict_all_unmaintained(test_y));
      b2_preds.push_back(predict_random(test_y, derive_seed(options.seed, {tag(Stream::baseline), r, f})));
    }
    auto& out = result.rounds[r];
    out.model = aggregate(model_preds, options.aggregation);
    out.baseline1 = aggregate(b1_preds, options.aggregation);
    out.baseline2 = aggregate(b2_preds, options.aggregation);
  });

  std::vector<MetricSet> m, b1, b2;
  for (const auto& r : result.rounds) {
    m.push_back(r.model);
    b1.push_back(r.baseline1);
    b2.push_back(r.baseline2);
  }
  result.model = summarize(m);
  result.baseline1 = summarize(b1);
  result.baseline2 = summarize(b2);
  return result;
}

void write_metrics_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::vector<csv::Row> rows;
  csv::Row header{"round"};
  for (const char* who : {"model", "baseline1", "baseline2"})
    for (const char* metric : {"accuracy", "precision", "recall", "f_measure", "kappa", "auc"})
      header.push_back(std::string(who) + "_" + metric);
  rows.push_back(header);
  const auto append = [](csv::Row& row, const MetricSet& m) {
    for (double v : {m.accuracy, m.precision, m.recall, m.f_measure, m.kappa, m.auc}) row.push_back(csv::format_number(v));
  };
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    csv::Row row{std::to_string(r + 1)};
    append(row, result.rounds[r].model);
    append(row, result.rounds[r].baseline1);
    append(row, result.rounds[r].baseline2);
    rows.push_back(std::move(row));
  }
  csv::Row mean{"MEAN"};
  append(mean, result.model.mean);
  append(mean, result.baseline1.mean);
  append(mean, result.baseline2.mean);
  rows.push_back(std::move(mean));
  csv::write_file(path, rows);
}

}  // namespace rv
