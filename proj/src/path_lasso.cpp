#include <algorithm>
#include <cmath>

#include "cap/dataset.hpp"
#include "cap/internal/path_common.hpp"
#include "cap/path.hpp"

namespace cap {

namespace {

Eigen::VectorXi corr_signs(const Eigen::VectorXd& c) {
  Eigen::VectorXi s(c.size());
  for (int j = 0; j < c.size(); ++j)
    s[j] = std::abs(c[j]) <= path_zero_tol ? 0 : (c[j] > 0 ? 1 : -1);
  return s;
}

}  // namespace

RegularizationPath lasso_path(const Dataset& ds) {
  const int n = ds.n();
  const int p = ds.p();
  require(ds.standardized || x_standardized(ds), errc::data_error,
          "design columns must be standardized");

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  const Eigen::VectorXd c0 = ds.x.transpose() * ds.y;

  RegularizationPath path;
  path.solver = "lasso";
  path.fingerprint = dataset_fingerprint(ds);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double lambda = c0.lpNorm<Eigen::Infinity>();
  if (lambda <= path_zero_tol) {
    path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
    return path;
  }

  std::vector<int> active;           // insertion order; sorted copy goes into breakpoints
  std::vector<double> sgn(p, 0.0);   // sign of the active coefficient
  const auto push = [&](double lam, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    if (!path.breakpoints.empty() && lam >= path.breakpoints.back().lambda) return;
    std::vector<int> act = active;
    std::sort(act.begin(), act.end());
    path.breakpoints.push_back({lam, b, act, {}, corr_signs(c), int(active.size())});
  };
  path.breakpoints.push_back({lambda, beta, {}, {}, corr_signs(c0), 0});

  int just_dropped = -1;
  const long cap = 200L * p + 2000;
  for (long iter = 0; iter < cap; ++iter) {
    const int k = int(active.size());
    Eigen::MatrixXd ga(k, k);
    Eigen::VectorXd rhs(k), s(k);
    for (int i = 0; i < k; ++i) {
      s[i] = sgn[active[i]];
      rhs[i] = c0[active[i]] - lambda * s[i];
      for (int j = 0; j < k; ++j) ga(i, j) = gram(active[i], active[j]);
    }
    const auto sol = detail::solve_gram(ga, rhs);
    const auto dir = detail::solve_gram(ga, s);
    if (!sol.ok || !dir.ok) {
      if (k >= n) return path;  // saturated: centered columns span at most n-1 dims
      fail(errc::degenerate_design, "active design is numerically singular");
    }
    beta.setZero();
    Eigen::VectorXd bdot = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < k; ++i) {
      beta[active[i]] = sol.z[i];
      bdot[active[i]] = dir.z[i];
    }
    const Eigen::VectorXd c = c0 - gram * beta;
    const Eigen::VectorXd h = gram * bdot;

    detail::EventQueue q;
    for (int i = 0; i < k; ++i) {  // kind 0: coefficient crosses zero
      const int j = active[i];
      if (sgn[j] * bdot[j] < 0.0) q.offer(-beta[j] / bdot[j], 0, i);
    }
    std::vector<char> is_active(p, 0);
    for (int j : active) is_active[j] = 1;
    for (int j = 0; j < p; ++j) {  // kind 1: |c_j| catches lambda
      if (is_active[j]) continue;
      // a just-dropped predictor sits on the boundary; require a real step so
      // the zero-length re-entry is suppressed but a later crossing is not
      const bool jd = j == just_dropped;
      const double dplus = (lambda - c[j]) / (1.0 - h[j]);
      const double dminus = (lambda + c[j]) / (1.0 + h[j]);
      if (1.0 - h[j] > 0.0 && (!jd || dplus > path_tie_tol)) q.offer(dplus, 1, j, 1);
      if (1.0 + h[j] > 0.0 && (!jd || dminus > path_tie_tol)) q.offer(dminus, 1, j, -1);
    }
    q.offer(lambda, 2);  // kind 2: lambda reaches zero

    const auto ev = q.pick();
    require(bool(ev), errc::degenerate_design, "no feasible step");
    const double delta = std::min(ev->delta, lambda);
    const double lambda_new = lambda - delta;
    beta += delta * bdot;
    if (ev->kind == 0) beta[active[ev->a]] = 0.0;
    push(lambda_new, beta, c - delta * h);
    if (delta > path_tie_tol) just_dropped = -1;

    if (ev->kind == 2) return path;
    if (ev->kind == 0) {
      just_dropped = active[ev->a];
      sgn[just_dropped] = 0.0;
      active.erase(active.begin() + ev->a);
    } else {
      active.push_back(ev->a);
      sgn[ev->a] = ev->b;
    }
    lambda = lambda_new;
  }
  fail(errc::degenerate_design, "homotopy failed to make progress");
}

}  // namespace cap
