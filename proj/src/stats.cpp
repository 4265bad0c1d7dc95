#include "repo_vitality/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include "repo_vitality/error.hpp"

namespace rv {

SpearmanTest<double> spearman_test(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size())
    throw Error(ErrorKind::length_mismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.size() < 3) throw Error(ErrorKind::length_mismatch, "need at least 3 pairs, got " + std::to_string(x.size()));
  const auto c = spearman(x, y);
  if (c.degenerate) throw Error(ErrorKind::degenerate_input, "all values tied on one side");

  SpearmanTest<double> out{c.rho, 0.0, false};
  const double dof = static_cast<double>(x.size() - 2);
  const double one_minus = (1.0 - c.rho) * (1.0 + c.rho);
  if (one_minus <= 0.0) return out;  // |rho| = 1
  const double t = c.rho * std::sqrt(dof / one_minus);
  boost::math::students_t_distribution<double> dist(dof);
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return out;
}

}  // namespace rv
