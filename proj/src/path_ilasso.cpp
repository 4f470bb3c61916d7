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

RegularizationPath ilasso_path(const Dataset& ds) {
  const int n = ds.n();
  const int p = ds.p();
  require(ds.standardized || x_standardized(ds), errc::data_error,
          "design columns must be standardized");

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  const Eigen::VectorXd c0 = ds.x.transpose() * ds.y;

  RegularizationPath path;
  path.solver = "ilasso";
  path.fingerprint = dataset_fingerprint(ds);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double lambda = c0.lpNorm<1>();
  if (lambda <= path_zero_tol) {
    path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
    return path;
  }
  path.breakpoints.push_back({lambda, beta, {}, {}, corr_signs(c0), 0});

  // every coordinate starts pinned at the (zero) max with the sign of x'y
  std::vector<int> r(p), u;
  std::vector<double> sgn(p);
  for (int j = 0; j < p; ++j) {
    r[j] = j;
    sgn[j] = c0[j] >= 0 ? 1.0 : -1.0;
  }
  const auto push = [&](double lam, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    if (lam >= path.breakpoints.back().lambda) return;
    GroupState st{0, r, u};
    std::sort(st.r.begin(), st.r.end());
    std::sort(st.u.begin(), st.u.end());
    path.breakpoints.push_back({lam, b, {0}, {st}, corr_signs(c), 1 + int(u.size())});
  };

  int just_moved = -1;
  const long cap = 200L * p + 2000;
  for (long iter = 0; iter < cap; ++iter) {
    const int m = 1 + int(u.size());
    // unknowns: (alpha, beta_u); pinned block enters through sum_j s_j x_j
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m), unit = Eigen::VectorXd::Zero(m);
    unit[0] = 1.0;
    double sc = 0.0;
    for (int j : r) sc += sgn[j] * c0[j];
    rhs[0] = sc - lambda;
    for (int a : r)
      for (int b : r) w(0, 0) += sgn[a] * sgn[b] * gram(a, b);
    for (size_t i = 0; i < u.size(); ++i) {
      rhs[1 + i] = c0[u[i]];
      for (int a : r) w(0, 1 + i) += sgn[a] * gram(a, u[i]);
      w(1 + i, 0) = w(0, 1 + i);
      for (size_t j = 0; j < u.size(); ++j) w(1 + i, 1 + j) = gram(u[i], u[j]);
    }
    const auto sol = detail::solve_gram(w, rhs);
    const auto dir = detail::solve_gram(w, unit);
    if (!sol.ok || !dir.ok) {
      if (m >= n) return path;  // saturated: centered columns span at most n-1 dims
      fail(errc::degenerate_design, "pinned system is numerically singular");
    }
    const double alpha = sol.z[0];
    const double adot = dir.z[0];
    beta.setZero();
    Eigen::VectorXd bdot = Eigen::VectorXd::Zero(p);
    for (int j : r) beta[j] = sgn[j] * alpha;
    for (int j : r) bdot[j] = sgn[j] * adot;
    for (size_t i = 0; i < u.size(); ++i) {
      beta[u[i]] = sol.z[1 + i];
      bdot[u[i]] = dir.z[1 + i];
    }
    const Eigen::VectorXd c = c0 - gram * beta;
    const Eigen::VectorXd cdot = -gram * bdot;

    detail::EventQueue q;
    // the just-moved coordinate still sits on the boundary it left, so its
    // zero-length reverse flip is suppressed; a later real crossing is kept
    const auto offer_flip = [&](double delta, int kind, int a, int b, int j) {
      if (j == just_moved && !(delta > path_tie_tol)) return;
      q.offer(delta, kind, a, b);
    };
    if (r.size() > 1) {
      for (size_t i = 0; i < r.size(); ++i) {  // kind 0: pinned correlation hits zero
        const int j = r[i];
        const double tdot = sgn[j] * cdot[j];
        if (tdot < 0.0) offer_flip(-sgn[j] * c[j] / tdot, 0, int(i), 0, j);
      }
    }
    for (size_t i = 0; i < u.size(); ++i) {  // kind 1: free coefficient hits the max
      const int j = u[i];
      if (bdot[j] - adot > 0.0)
        offer_flip((alpha - beta[j]) / (bdot[j] - adot), 1, int(i), 1, j);
      if (bdot[j] + adot < 0.0)
        offer_flip(-(beta[j] + alpha) / (bdot[j] + adot), 1, int(i), -1, j);
    }
    q.offer(lambda, 2);

    const auto ev = q.pick();
    require(bool(ev), errc::degenerate_design, "no feasible step");
    const double delta = std::min(ev->delta, lambda);
    const double lambda_new = lambda - delta;
    beta += delta * bdot;
    push(lambda_new, beta, c + delta * cdot);
    if (delta > path_tie_tol) just_moved = -1;

    if (ev->kind == 2) return path;
    if (ev->kind == 0) {
      just_moved = r[ev->a];
      u.push_back(r[ev->a]);
      r.erase(r.begin() + ev->a);
    } else {
      const int j = u[ev->a];
      just_moved = j;
      sgn[j] = ev->b;
      u.erase(u.begin() + ev->a);
      r.push_back(j);
    }
    lambda = lambda_new;
  }
  fail(errc::degenerate_design, "homotopy failed to make progress");
}

}  // namespace cap
