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

RegularizationPath icap_path(const Dataset& ds, const Grouping& g_in) {
  const int n = ds.n();
  const int p = ds.p();
  require(ds.standardized || x_standardized(ds), errc::data_error,
          "design columns must be standardized");
  validate_grouping(g_in, p);
  require(!groups_overlap(g_in), errc::overlapping_groups, "groups must not overlap");
  require(g_in.gamma0 == 1.0, errc::wrong_norms, "outer norm must be 1");
  for (double gm : g_in.gamma)
    require(std::isinf(gm), errc::wrong_norms, "group norms must be infinity");

  // uncovered predictors become weight-1 singleton groups
  Grouping g = g_in;
  {
    std::vector<char> covered(p, 0);
    for (const auto& grp : g.groups)
      for (int j : grp) covered[j] = 1;
    for (int j = 0; j < p; ++j)
      if (!covered[j]) {
        g.groups.push_back({j});
        g.gamma.push_back(inf_norm);
        g.weights.push_back(1.0);
      }
  }
  const int kk = int(g.groups.size());

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  const Eigen::VectorXd c0 = ds.x.transpose() * ds.y;

  RegularizationPath path;
  path.solver = "icap";
  path.fingerprint = dataset_fingerprint(ds);

  const auto scaled_corr = [&](const Eigen::VectorXd& c, int k) {
    double s = 0.0;
    for (int j : g.groups[k]) s += std::abs(c[j]);
    return s / g.weights[k];
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double lambda = 0.0;
  for (int k = 0; k < kk; ++k) lambda = std::max(lambda, scaled_corr(c0, k));
  if (lambda <= path_zero_tol) {
    path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
    return path;
  }
  path.breakpoints.push_back({lambda, beta, {}, {}, corr_signs(c0), 0});

  std::vector<int> active;  // group ids, insertion order
  std::vector<std::vector<int>> rset(kk), uset(kk);
  std::vector<double> sgn(p, 0.0);
  const auto push = [&](double lam, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    if (lam >= path.breakpoints.back().lambda) return;
    std::vector<int> act = active;
    std::sort(act.begin(), act.end());
    std::vector<GroupState> st;
    int df = int(active.size());
    for (int k : act) {
      GroupState s{k, rset[k], uset[k]};
      std::sort(s.r.begin(), s.r.end());
      std::sort(s.u.begin(), s.u.end());
      df += int(s.u.size());
      st.push_back(std::move(s));
    }
    path.breakpoints.push_back({lam, b, act, st, corr_signs(c), df});
  };

  int just_moved = -1;    // coordinate excluded from r<->u flips at zero length
  int just_dropped = -1;  // group excluded from re-activation at zero length
  const long cap = 200L * (p + kk) + 2000;
  for (long iter = 0; iter < cap; ++iter) {
    // unknowns: one pinned magnitude per active group, then the free coefficients
    const int na = int(active.size());
    int m = na;
    std::vector<std::pair<int, int>> upos;  // (group, predictor)
    for (int k : active)
      for (int j : uset[k]) upos.emplace_back(k, j);
    m += int(upos.size());

    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(p, m);
    Eigen::VectorXd rhs(m), unit = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < na; ++a) {
      const int k = active[a];
      double sc = 0.0;
      for (int j : rset[k]) {
        cols(j, a) = sgn[j];
        sc += sgn[j] * c0[j];
      }
      rhs[a] = sc - lambda * g.weights[k];
      unit[a] = g.weights[k];
    }
    for (size_t i = 0; i < upos.size(); ++i) {
      cols(upos[i].second, na + int(i)) = 1.0;
      rhs[na + int(i)] = c0[upos[i].second];
    }
    const Eigen::MatrixXd ww = cols.transpose() * gram * cols;
    const auto sol = detail::solve_gram(ww, rhs);
    const auto dir = detail::solve_gram(ww, unit);
    if (!sol.ok || !dir.ok) {
      if (m >= n) return path;  // saturated: centered columns span at most n-1 dims
      fail(errc::degenerate_design, "pinned system is numerically singular");
    }
    beta = cols * sol.z;
    const Eigen::VectorXd bdot = cols * dir.z;
    const Eigen::VectorXd c = c0 - gram * beta;
    const Eigen::VectorXd cdot = -gram * bdot;

    detail::EventQueue q;
    // the just-moved coordinate still sits on the boundary it left, so its
    // zero-length reverse flip is suppressed; a later real crossing is kept
    const auto offer_flip = [&](double delta, int kind, int a, int b, int j) {
      if (j == just_moved && !(delta > path_tie_tol)) return;
      q.offer(delta, kind, a, b);
    };
    for (int a = 0; a < na; ++a) {  // kind 0: group max falls to zero
      const int k = active[a];
      if (dir.z[a] < 0.0) q.offer(-sol.z[a] / dir.z[a], 0, k);
    }
    for (int a = 0; a < na; ++a) {  // kind 1: pinned correlation hits zero
      const int k = active[a];
      if (rset[k].size() < 2) continue;
      for (int j : rset[k]) {
        const double tdot = sgn[j] * cdot[j];
        if (tdot < 0.0) offer_flip(-sgn[j] * c[j] / tdot, 1, k, j, j);
      }
    }
    for (int a = 0; a < na; ++a) {  // kind 2: free coefficient hits the group max
      const int k = active[a];
      const double mk = sol.z[a];
      const double mdot = dir.z[a];
      for (int j : uset[k]) {
        if (bdot[j] - mdot > 0.0) offer_flip((mk - beta[j]) / (bdot[j] - mdot), 2, k, j, j);
        if (bdot[j] + mdot < 0.0)
          offer_flip(-(beta[j] + mk) / (bdot[j] + mdot), 2, k, -j - 1, j);
      }
    }
    std::vector<char> is_active(kk, 0);
    for (int k : active) is_active[k] = 1;
    for (int k = 0; k < kk; ++k) {  // kind 3: scaled correlation catches lambda
      if (is_active[k]) continue;
      const int q_sz = int(g.groups[k].size());
      Eigen::VectorXd cg(q_sz), cgdot(q_sz), coef(q_sz);
      for (int i = 0; i < q_sz; ++i) {
        cg[i] = c[g.groups[k][i]];
        cgdot[i] = cdot[g.groups[k][i]];
        coef[i] = 1.0 / g.weights[k];
      }
      // a just-dropped group still satisfies its activation equality, so the
      // zero-length re-entry is suppressed via the step floor
      const double floor_d = k == just_dropped ? path_tie_tol : 0.0;
      const auto root =
          detail::first_piecewise_root(cg, cgdot, coef, -lambda, 1.0, floor_d, lambda);
      if (root) q.offer(*root, 3, k);
    }
    q.offer(lambda, 4);

    const auto ev = q.pick();
    require(bool(ev), errc::degenerate_design, "no feasible step");
    const double delta = std::min(ev->delta, lambda);
    const double lambda_new = lambda - delta;
    beta += delta * bdot;
    if (ev->kind == 0)
      for (int j : g.groups[ev->a]) beta[j] = 0.0;
    push(lambda_new, beta, c + delta * cdot);
    if (delta > path_tie_tol) just_moved = just_dropped = -1;

    switch (ev->kind) {
      case 4:
        return path;
      case 0: {  // drop the whole group
        const int k = ev->a;
        active.erase(std::find(active.begin(), active.end(), k));
        for (int j : g.groups[k]) sgn[j] = 0.0;
        rset[k].clear();
        uset[k].clear();
        just_dropped = k;
        break;
      }
      case 1: {  // pinned -> free
        const int k = ev->a;
        const int j = ev->b;
        rset[k].erase(std::find(rset[k].begin(), rset[k].end(), j));
        uset[k].push_back(j);
        just_moved = j;
        break;
      }
      case 2: {  // free -> pinned
        const int k = ev->a;
        const int j = ev->b >= 0 ? ev->b : -ev->b - 1;
        sgn[j] = ev->b >= 0 ? 1.0 : -1.0;
        uset[k].erase(std::find(uset[k].begin(), uset[k].end(), j));
        rset[k].push_back(j);
        just_moved = j;
        break;
      }
      case 3: {  // activate: every coordinate pins at the (zero) max
        const int k = ev->a;
        const Eigen::VectorXd cnow = c + delta * cdot;
        active.push_back(k);
        for (int j : g.groups[k]) {
          rset[k].push_back(j);
          sgn[j] = cnow[j] >= 0 ? 1.0 : -1.0;
        }
        break;
      }
    }
    lambda = lambda_new;
  }
  fail(errc::degenerate_design, "homotopy failed to make progress");
}

}  // namespace cap
