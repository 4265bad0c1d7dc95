#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repo_vitality/forest.hpp"

namespace rv {

/// 2*(p-0.5)*100 for p >= 0.5, absent below. Throws Error(out_of_range) outside [0,1].
std::optional<double> lma(double p_active);

/// Same score from a vote count; exact on the vote grid ((200k - 100n) / n).
std::optional<double> lma_from_votes(int active_votes, int n_trees);

struct LmaScore {
  std::string repo_id;
  double p_active{0.0};
  int active_votes{0};
  int n_trees{0};
  std::optional<double> lma;  // present iff p_active >= 0.5
};

struct LmaSummary {
  std::size_t count{0};  // projects with a score
  std::optional<double> q1, q2, q3;
  std::size_t count_max{0};  // LMA == 100
};

struct LmaCorpus {
  std::vector<LmaScore> scores;  // every input project, input order
  LmaSummary summary;            // over projects predicted active
};

LmaScore score_vector(const ForestModel& model, const DataPointVector& x);
LmaCorpus score_corpus(const ForestModel& model, const std::vector<DataPointVector>& vectors, unsigned threads = 1);
LmaSummary summarize_lma(const std::vector<double>& values);

}  // namespace rv
