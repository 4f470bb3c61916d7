#include "cap/penalty.hpp"

#include <cmath>

namespace cap {

double vector_norm(const Eigen::VectorXd& v, double gamma) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(gamma)) return v.cwiseAbs().maxCoeff();
  if (gamma == 1.0) return v.cwiseAbs().sum();
  if (gamma == 2.0) return v.norm();
  // stable general case: factor out the max
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, gamma);
  return m * std::pow(s, 1.0 / gamma);
}

PenaltyValue evaluate_penalty(const Eigen::VectorXd& beta, const Grouping& g) {
  validate_grouping(g, int(beta.size()));
  PenaltyValue out;
  out.group_norms.resize(Eigen::Index(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    Eigen::VectorXd sub(Eigen::Index(g.groups[k].size()));
    for (std::size_t i = 0; i < g.groups[k].size(); ++i) sub[Eigen::Index(i)] = beta[g.groups[k][i]];
    out.group_norms[Eigen::Index(k)] = g.weights[k] * vector_norm(sub, g.gamma[k]);
  }
  out.total = vector_norm(out.group_norms, g.gamma0);
  return out;
}

double penalized_objective(const Dataset& ds, const Eigen::VectorXd& beta, const Grouping& g,
                           double lambda) {
  require(beta.size() == ds.p(), errc::dimension_mismatch, "beta length != p");
  const double rss = (ds.y - ds.x * beta).squaredNorm();
  return 0.5 * rss + lambda * evaluate_penalty(beta, g).total;
}

}  // namespace cap
