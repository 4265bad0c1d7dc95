#include <gtest/gtest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "repo_vitality/error.hpp"
#include "repo_vitality/prune.hpp"
#include "repo_vitality/stats.hpp"

#include <nlohmann/json.hpp>
#include <numeric>

using namespace rv;
using namespace rv::test;

namespace {

FeatureTable table_of(const Eigen::MatrixXd& values) {
  FeatureTable t;
  t.values = values;
  for (Eigen::Index i = 0; i < values.rows(); ++i) t.row_ids.push_back("r" + std::to_string(i));
  for (Eigen::Index j = 0; j < values.cols(); ++j) t.columns.push_back("c" + std::to_string(j));
  return t;
}

// Textbook Spearman for tie-free data: 1 - 6 sum d^2 / (n (n^2 - 1)).
double spearman_no_ties(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto n = x.size();
  double d2 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int rx = 1, ry = 1;
    for (Eigen::Index j = 0; j < n; ++j) {
      rx += x(j) < x(i);
      ry += y(j) < y(i);
    }
    d2 += double(rx - ry) * (rx - ry);
  }
  return 1.0 - 6.0 * d2 / (double(n) * (double(n) * n - 1));
}

// Complete linkage on three points, spelled out: merge the closest pair if it clears the cut, then
// absorb the third only if it is close enough to both.
std::set<std::set<int>> complete_linkage_3(const Eigen::Matrix3d& r, double thr) {
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  auto best = pairs[0];
  for (auto p : pairs)
    if (std::abs(r(p.first, p.second)) > std::abs(r(best.first, best.second))) best = p;
  if (std::abs(r(best.first, best.second)) < thr) return {{0}, {1}, {2}};
  const int third = 3 - best.first - best.second;
  const double link = std::min(std::abs(r(third, best.first)), std::abs(r(third, best.second)));
  if (link >= thr) return {{0, 1, 2}};
  return {{best.first, best.second}, {third}};
}

Eigen::MatrixXd random_correlated_columns(std::mt19937_64& g, int rows, int cols) {
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> pick(0, 2);
  Eigen::MatrixXd m(rows, cols);
  const int latent = 4;
  Eigen::MatrixXd z(rows, latent);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < latent; ++k) z(i, k) = n01(g);
  for (int j = 0; j < cols; ++j) {
    const int k = j % latent;
    const double noise = 0.2 * pick(g);
    for (int i = 0; i < rows; ++i) m(i, j) = j % 5 == 4 ? n01(g) : z(i, k) + noise * n01(g);
  }
  return m;
}

}  // namespace

TEST(Correlation, ReflexiveAndRankPreserving) {
  Eigen::MatrixXd v(5, 2);
  v << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
  const auto m = correlation_matrix(table_of(v));
  EXPECT_EQ(m.rho(0, 0), 1.0);
  EXPECT_NEAR(m.rho(0, 1), 1.0, 1e-15);
}

TEST(Correlation, ReversedThreePointsIsMinusOne) {
  Eigen::MatrixXd v(3, 2);
  v << 1, 3, 2, 2, 3, 1;
  EXPECT_NEAR(correlation_matrix(table_of(v)).rho(0, 1), -1.0, 1e-15);
}

TEST(Correlation, MatchesTextbookFormulaWithoutTies) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd v(12, 2);
    for (int i = 0; i < 12; ++i) v(i, 0) = u(g), v(i, 1) = v(i, 0) + u(g);
    EXPECT_NEAR(correlation_matrix(table_of(v)).rho(0, 1), spearman_no_ties(v.col(0), v.col(1)), 1e-12);
  }
}

TEST(Correlation, TiesUseAverageRanks) {
  Eigen::VectorXd x(4);
  x << 10, 20, 20, 30;
  Eigen::VectorXd expected(4);
  expected << 1, 2.5, 2.5, 4;
  EXPECT_EQ(average_ranks(x), expected);
  // Pearson on (1, 2.5, 2.5, 4) vs (1, 2, 3, 4) is 0.9486832980505138 = 3/sqrt(10).
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  EXPECT_NEAR(spearman(x, y).rho, 3.0 / std::sqrt(10.0), 1e-15);
}

TEST(Correlation, ConstantColumnIsFlaggedAndZero) {
  Eigen::MatrixXd v(4, 2);
  v << 1, 7, 2, 7, 3, 7, 4, 7;
  const auto m = correlation_matrix(table_of(v));
  EXPECT_TRUE(m.constant[1]);
  EXPECT_FALSE(m.constant[0]);
  EXPECT_EQ(m.rho(0, 1), 0.0);
  EXPECT_EQ(m.rho(1, 1), 1.0);
}

TEST(Correlation, TooFewRows) {
  EXPECT_RV_ERROR(correlation_matrix(table_of(Eigen::MatrixXd::Ones(1, 3))), ErrorKind::too_few_rows);
}

TEST(Correlation, SymmetricBoundedAndThreadIndependent) {
  std::mt19937_64 g(3);
  const auto t = table_of(random_correlated_columns(g, 40, 15));
  const auto a = correlation_matrix(t, 1);
  const auto b = correlation_matrix(t, 4);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.rho, a.rho.transpose());
  EXPECT_LE(a.rho.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Cluster, IdenticalPairCollapses) {
  Eigen::MatrixXd v(6, 3);
  v << 1, 1, 5, 2, 2, 3, 3, 3, 6, 4, 4, 1, 5, 5, 2, 6, 6, 4;
  const auto r = prune(table_of(v));
  EXPECT_EQ(r.kept, (std::vector<std::string>{"c0", "c2"}));
  EXPECT_EQ(r.removed, std::vector<std::string>{"c1"});
}

TEST(Cluster, NothingAboveThresholdKeepsAll) {
  Eigen::Matrix3d r;
  r << 1, 0.5, -0.6, 0.5, 1, 0.1, -0.6, 0.1, 1;
  const auto rep = cluster_and_select(r, {"a", "b", "c"});
  EXPECT_EQ(rep.kept.size(), 3u);
  EXPECT_TRUE(rep.removed.empty());
}

TEST(Cluster, ThreeByThreeExample) {
  Eigen::Matrix3d r;
  r << 1, 0.9, 0.1, 0.9, 1, 0.1, 0.1, 0.1, 1;
  const auto rep = cluster_and_select(r, {"1", "2", "3"});
  EXPECT_EQ(rep.kept, (std::vector<std::string>{"1", "3"}));
  ASSERT_EQ(rep.clusters.size(), 2u);
  EXPECT_EQ(rep.clusters[0].members, (std::vector<std::string>{"1", "2"}));
}

TEST(Cluster, MatchesSpelledOutLinkageOnRandom3x3) {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r(0, 1) = r(1, 0) = u(g);
    r(0, 2) = r(2, 0) = u(g);
    r(1, 2) = r(2, 1) = u(g);
    const auto rep = cluster_and_select(r, {"0", "1", "2"}, 0.7);
    std::set<std::set<int>> got;
    for (const auto& c : rep.clusters) {
      std::set<int> s;
      for (const auto& m : c.members) s.insert(std::stoi(m));
      got.insert(s);
    }
    EXPECT_EQ(got, complete_linkage_3(r, 0.7));
  }
}

TEST(Cluster, NegativeCorrelationCountsAsSimilar) {
  Eigen::Matrix2d r;
  r << 1, -0.95, -0.95, 1;
  EXPECT_EQ(cluster_and_select(r, {"a", "b"}).kept, std::vector<std::string>{"a"});
}

TEST(Cluster, ReportInvariantsAndGuaranteeOnRandomTables) {
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = table_of(random_correlated_columns(g, 60, 24));
    const auto m = correlation_matrix(t);
    const auto rep = cluster_and_select(m.rho, t.columns, 0.7);
    std::set<std::string> kept(rep.kept.begin(), rep.kept.end()), removed(rep.removed.begin(), rep.removed.end());
    EXPECT_EQ(kept.size() + removed.size(), t.columns.size());
    for (const auto& k : kept) EXPECT_FALSE(removed.count(k));
    for (const auto& c : rep.clusters) {
      EXPECT_TRUE(kept.count(c.representative));
      EXPECT_EQ(c.representative, c.members.front());
      const auto ri = t.column_index(c.representative);
      for (const auto& name : c.members) {
        if (name == c.representative) continue;
        EXPECT_TRUE(removed.count(name));
        EXPECT_GE(std::abs(m.rho(t.column_index(name), ri)), 0.7);
      }
      // Complete linkage: every pair inside a cluster clears the threshold.
      for (const auto& a : c.members)
        for (const auto& b : c.members) EXPECT_GE(std::abs(m.rho(t.column_index(a), t.column_index(b))), 0.7);
    }
  }
}

TEST(Cluster, InvariantUnderRowPermutation) {
  std::mt19937_64 g(12);
  const auto v = random_correlated_columns(g, 50, 20);
  std::vector<Eigen::Index> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  const auto t = table_of(v);
  const auto a = prune(t);
  const auto b = prune(select_rows(t, perm));
  EXPECT_EQ(a.kept, b.kept);
  EXPECT_EQ(a.removed, b.removed);
}

TEST(Cluster, RerunOnKeptColumnsOfBlockTableRemovesNothing) {
  std::mt19937_64 g(21);
  const auto t = table_of(random_correlated_columns(g, 80, 20));
  const auto first = prune(t);
  const auto second = prune(select_columns(t, first.kept));
  EXPECT_TRUE(second.removed.empty());
}

TEST(Cluster, ValidatesInputs) {
  EXPECT_RV_ERROR(cluster_and_select(Eigen::Matrix2d::Identity(), {"a"}), ErrorKind::inconsistent_inputs);
  EXPECT_RV_ERROR(cluster_and_select(Eigen::Matrix2d::Identity(), {"a", "b"}, 0.0), ErrorKind::invalid_params);
}

TEST(Cluster, ReportJsonIsStable) {
  TempDir dir;
  Eigen::Matrix3d r;
  r << 1, 0.9, 0.1, 0.9, 1, 0.1, 0.1, 0.1, 1;
  const auto rep = cluster_and_select(r, {"x@T_{1,3}", "y@T_{1,3}", "z@T_{1,3}"});
  write_report_json(rep, dir / "a.json");
  write_report_json(rep, dir / "b.json");
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "a.json"));
  EXPECT_EQ(j["kept"].size(), 2u);
  EXPECT_EQ(j["clusters"][0]["representative"], "x@T_{1,3}");
}
