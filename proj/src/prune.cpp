#include "repo_vitality/prune.hpp"

#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "repo_vitality/error.hpp"
#include "repo_vitality/parallel.hpp"
#include "repo_vitality/stats.hpp"

namespace rv {

CorrelationMatrix correlation_matrix(const FeatureTable& table, unsigned threads) {
  if (table.rows() < 2)
    throw Error(ErrorKind::too_few_rows, "correlation needs at least 2 rows, got " + std::to_string(table.rows()));
  const Eigen::Index p = table.cols();
  Eigen::MatrixXd ranks(table.rows(), p);
  CorrelationMatrix out;
  out.constant.assign(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!table.values.col(j).allFinite())
      throw Error(ErrorKind::inconsistent_inputs, "column '" + table.columns[static_cast<std::size_t>(j)] + "' has non-finite values");
    ranks.col(j) = average_ranks(table.values.col(j));
    out.constant[static_cast<std::size_t>(j)] = (table.values.col(j).array() == table.values(0, j)).all();
  }
  out.rho = Eigen::MatrixXd::Identity(p, p);
  parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double r = pearson(ranks.col(j), ranks.col(k)).rho;
      out.rho(j, k) = r;
      out.rho(k, j) = r;
    }
  });
  return out;
}

CorrelationReport cluster_and_select(const Eigen::MatrixXd& rho, const std::vector<std::string>& names, double threshold) {
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != names.size())
    throw Error(ErrorKind::inconsistent_inputs, "correlation matrix does not match the name list");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::invalid_params, "threshold must be in (0,1]");

  const std::size_t n = names.size();
  // Clusters hold member indices in ascending (canonical) order; similarity = min |rho| over pairs.
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  Eigen::MatrixXd sim = rho.cwiseAbs();

  std::vector<bool> alive(n, true);
  for (;;) {
    double best = -1.0;
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        const double s = sim(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (s > best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    if (ba == n || best < threshold) break;
    auto& target = clusters[ba];
    target.insert(target.end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(target.begin(), target.end());
    clusters[bb].clear();
    alive[bb] = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == ba) continue;
      const auto ia = static_cast<Eigen::Index>(ba), ib = static_cast<Eigen::Index>(bb), ic = static_cast<Eigen::Index>(c);
      const double s = std::min(sim(ia, ic), sim(ib, ic));
      sim(ia, ic) = s;
      sim(ic, ia) = s;
    }
  }

  CorrelationReport report;
  report.threshold = threshold;
  std::vector<bool> keep(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    if (!alive[a]) continue;
    Cluster c;
    for (auto m : clusters[a]) c.members.push_back(names[m]);
    c.representative = names[clusters[a].front()];
    keep[clusters[a].front()] = true;
    report.clusters.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) (keep[i] ? report.kept : report.removed).push_back(names[i]);
  return report;
}

CorrelationReport prune(const FeatureTable& table, double threshold, unsigned threads) {
  const auto m = correlation_matrix(table, threads);
  return cluster_and_select(m.rho, table.columns, threshold);
}

void write_report_json(const CorrelationReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["threshold"] = report.threshold;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& c : report.clusters) {
    nlohmann::ordered_json cj;
    cj["representative"] = c.representative;
    cj["members"] = c.members;
    j["clusters"].push_back(std::move(cj));
  }
  j["kept"] = report.kept;
  j["removed"] = report.removed;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace rv
