#include "repo_vitality/lma.hpp"

#include <cmath>

#include "repo_vitality/error.hpp"
#include "repo_vitality/parallel.hpp"
#include "repo_vitality/stats.hpp"

namespace rv {

std::optional<double> lma(double p_active) {
  if (!(p_active >= 0.0 && p_active <= 1.0))
    throw Error(ErrorKind::out_of_range, "p_active " + std::to_string(p_active) + " not in [0,1]");
  if (p_active < 0.5) return std::nullopt;
  return 2.0 * (p_active - 0.5) * 100.0;
}

std::optional<double> lma_from_votes(int active_votes, int n_trees) {
  if (n_trees < 1 || active_votes < 0 || active_votes > n_trees)
    throw Error(ErrorKind::out_of_range, std::to_string(active_votes) + " of " + std::to_string(n_trees) + " votes");
  if (2 * active_votes < n_trees) return std::nullopt;
  return static_cast<double>(200LL * active_votes - 100LL * n_trees) / static_cast<double>(n_trees);
}

LmaScore score_vector(const ForestModel& model, const DataPointVector& x) {
  LmaScore s;
  s.repo_id = x.repo_id;
  s.n_trees = model.n_trees();
  s.active_votes = active_votes(model, model_row(model, x));
  s.p_active = static_cast<double>(s.active_votes) / static_cast<double>(s.n_trees);
  s.lma = lma_from_votes(s.active_votes, s.n_trees);
  return s;
}

LmaSummary summarize_lma(const std::vector<double>& values) {
  LmaSummary out;
  out.count = values.size();
  if (values.empty()) return out;
  out.q1 = quantile(values, 0.25);
  out.q2 = quantile(values, 0.50);
  out.q3 = quantile(values, 0.75);
  for (double v : values) out.count_max += v == 100.0;
  return out;
}

LmaCorpus score_corpus(const ForestModel& model, const std::vector<DataPointVector>& vectors, unsigned threads) {
  LmaCorpus out;
  out.scores.resize(vectors.size());
  parallel_for(vectors.size(), threads, [&](std::size_t i) { out.scores[i] = score_vector(model, vectors[i]); });
  std::vector<double> present;
  for (const auto& s : out.scores)
    if (s.lma) present.push_back(*s.lma);
  out.summary = summarize_lma(present);
  return out;
}

}  // namespace rv
