#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace rv {

/// Neumaier-compensated running sum.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

/// 1-based ranks with ties assigned their average rank.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> average_ranks(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[static_cast<std::size_t>(j + 1)]) == x(order[static_cast<std::size_t>(i)])) ++j;
    const Scalar avg = static_cast<Scalar>(i + j + 2) / Scalar(2);
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

template <typename Scalar>
struct Correlation {
  Scalar rho{0};
  /// One side has zero rank variance; rho is reported as 0.
  bool degenerate{false};
};

/// Pearson correlation of two equal-length vectors.
template <typename DerivedX, typename DerivedY>
Correlation<typename DerivedX::Scalar> pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Scalar mx = x.mean(), my = y.mean();
  const auto dx = (x.array() - mx).matrix();
  const auto dy = (y.array() - my).matrix();
  const Scalar sxx = dx.squaredNorm(), syy = dy.squaredNorm();
  if (sxx <= Scalar(0) || syy <= Scalar(0)) return {Scalar(0), true};
  const Scalar r = dx.dot(dy) / std::sqrt(sxx * syy);
  return {std::clamp(r, Scalar(-1), Scalar(1)), false};
}

/// Tie-corrected Spearman rho: Pearson correlation of average ranks.
template <typename DerivedX, typename DerivedY>
Correlation<typename DerivedX::Scalar> spearman(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

template <typename Scalar>
struct SpearmanTest {
  Scalar rho{0};
  Scalar p_value{1};
  bool degenerate{false};
};

/// Spearman rho with a two-sided p-value from t = rho*sqrt((n-2)/(1-rho^2)) on n-2 degrees of freedom.
/// Throws Error(length_mismatch) for unequal or too-short (< 3) inputs and Error(degenerate_input) when
/// either side is all ties.
SpearmanTest<double> spearman_test(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Linear interpolation between closest ranks (position (n-1)q on the sorted sample).
template <typename Derived>
typename Derived::Scalar quantile(const Eigen::DenseBase<Derived>& sample, double q) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> v;
  v.reserve(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index i = 0; i < sample.size(); ++i) v.push_back(sample.coeff(i));
  if (v.empty()) return Scalar(0);
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const Scalar frac = static_cast<Scalar>(pos - static_cast<double>(lo));
  return v[lo] + frac * (v[hi] - v[lo]);
}

inline double quantile(const std::vector<double>& sample, double q) {
  return quantile(Eigen::Map<const Eigen::VectorXd>(sample.data(), static_cast<Eigen::Index>(sample.size())), q);
}

}  // namespace rv
