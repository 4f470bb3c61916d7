#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cap/internal/simplex.hpp"
#include "cap/penalty.hpp"

namespace cap {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double dual_exponent(double gamma) {
  if (std::isinf(gamma)) return 1.0;
  if (gamma <= 1.0) return inf;
  return gamma / (gamma - 1.0);
}

Eigen::VectorXd subvec(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

bool group_is_zero(const Eigen::VectorXd& b) {
  return b.lpNorm<Eigen::Infinity>() <= kink_tol;
}

// Gradient of ||.||_gamma at b != 0 for finite gamma > 1.
Eigen::VectorXd norm_gradient(const Eigen::VectorXd& b, double gamma) {
  const double scale = b.cwiseAbs().maxCoeff();
  Eigen::VectorXd g(b.size());
  double denom = 0.0;
  for (int i = 0; i < b.size(); ++i) denom += std::pow(std::abs(b[i]) / scale, gamma);
  denom = std::pow(denom, (gamma - 1.0) / gamma);
  for (int i = 0; i < b.size(); ++i) {
    const double a = std::abs(b[i]) / scale;
    g[i] = (b[i] >= 0 ? 1.0 : -1.0) * std::pow(a, gamma - 1.0) / denom;
  }
  return g;
}

// Coordinates attaining the group max, with signs; b is a nonzero inf-group.
void max_set(const Eigen::VectorXd& b, std::vector<int>* set, std::vector<double>* sgn) {
  const double m = b.cwiseAbs().maxCoeff();
  const double tol = kink_tol * std::max(1.0, m);
  for (int i = 0; i < b.size(); ++i)
    if (std::abs(b[i]) >= m - tol) {
      set->push_back(i);
      sgn->push_back(b[i] >= 0 ? 1.0 : -1.0);
    }
}

// ---- exact per-group test, nonoverlapping groupings, any gamma0 ----------

// Violation of v_k against the subdifferential piece of group k scaled by
// budget rho (equality for nonzero groups, ||.||_{gamma*} <= rho for zero).
double group_violation(const Eigen::VectorXd& b, const Eigen::VectorXd& v,
                       double gamma, double rho) {
  double viol = 0.0;
  if (group_is_zero(b)) {
    const double mass = vector_norm(v, dual_exponent(gamma));
    return std::max(0.0, mass - rho);
  }
  if (std::isinf(gamma)) {
    std::vector<int> s;
    std::vector<double> sgn;
    max_set(b, &s, &sgn);
    std::vector<char> in(b.size(), 0);
    for (int j : s) in[j] = 1;
    double signed_mass = 0.0;
    for (int j = 0; j < b.size(); ++j)
      if (!in[j]) viol = std::max(viol, std::abs(v[j]));
    for (size_t i = 0; i < s.size(); ++i) {
      const double coord = v[s[i]] * sgn[i];
      viol = std::max(viol, std::max(0.0, -coord));
      signed_mass += coord;
    }
    return std::max(viol, std::abs(signed_mass - rho));
  }
  if (gamma == 1.0) {
    for (int j = 0; j < b.size(); ++j) {
      if (std::abs(b[j]) > kink_tol)
        viol = std::max(viol, std::abs(v[j] - rho * (b[j] >= 0 ? 1.0 : -1.0)));
      else
        viol = std::max(viol, std::max(0.0, std::abs(v[j]) - rho));
    }
    return viol;
  }
  const Eigen::VectorXd u = rho * norm_gradient(b, gamma);
  return (v - u).lpNorm<Eigen::Infinity>();
}

double nonoverlap_violation(const Eigen::VectorXd& beta, const Grouping& g,
                            const Eigen::VectorXd& v) {
  const PenaltyValue pv = evaluate_penalty(beta, g);
  const int kk = int(g.groups.size());
  double viol = 0.0;

  std::vector<char> covered(beta.size(), 0);
  for (const auto& grp : g.groups)
    for (int j : grp) covered[j] = 1;
  for (int j = 0; j < beta.size(); ++j)
    if (!covered[j]) viol = std::max(viol, std::abs(v[j]));

  if (pv.total <= 0.0) {
    // beta = 0 over every group: || (||v_k||_{gamma_k*} / alpha_k)_k ||_{gamma0*} <= 1
    Eigen::VectorXd m(kk);
    for (int k = 0; k < kk; ++k)
      m[k] = vector_norm(subvec(v, g.groups[k]), dual_exponent(g.gamma[k])) / g.weights[k];
    return std::max(viol, std::max(0.0, vector_norm(m, dual_exponent(g.gamma0)) - 1.0));
  }

  if (!std::isinf(g.gamma0)) {
    for (int k = 0; k < kk; ++k) {
      const Eigen::VectorXd b = subvec(beta, g.groups[k]);
      const Eigen::VectorXd vk = subvec(v, g.groups[k]);
      double w = 1.0;
      if (g.gamma0 > 1.0) w = std::pow(pv.group_norms[k] / pv.total, g.gamma0 - 1.0);
      if (group_is_zero(b) && w <= 0.0) {
        viol = std::max(viol, vk.lpNorm<Eigen::Infinity>());
        continue;
      }
      viol = std::max(viol, group_violation(b, vk, g.gamma[k], w * g.weights[k]));
    }
    return viol;
  }

  // gamma0 = inf: weights live on the simplex over argmax-norm groups.
  double wsum = 0.0;
  for (int k = 0; k < kk; ++k) {
    const Eigen::VectorXd b = subvec(beta, g.groups[k]);
    const Eigen::VectorXd vk = subvec(v, g.groups[k]);
    const bool argmax = pv.group_norms[k] >= pv.total * (1.0 - 1e-9);
    if (group_is_zero(b) || !argmax) {
      viol = std::max(viol, vk.lpNorm<Eigen::Infinity>());
      continue;
    }
    // implied simplex weight from vk, then structural check at that budget
    double w = 0.0;
    if (std::isinf(g.gamma[k])) {
      std::vector<int> s;
      std::vector<double> sgn;
      max_set(b, &s, &sgn);
      for (size_t i = 0; i < s.size(); ++i) w += vk[s[i]] * sgn[i];
      w = std::max(0.0, w) / g.weights[k];
    } else if (g.gamma[k] == 1.0) {
      int cnt = 0;
      for (int j = 0; j < b.size(); ++j)
        if (std::abs(b[j]) > kink_tol) {
          w += vk[j] * (b[j] >= 0 ? 1.0 : -1.0);
          ++cnt;
        }
      w = std::max(0.0, w) / (g.weights[k] * cnt);
    } else {
      const Eigen::VectorXd d = g.weights[k] * norm_gradient(b, g.gamma[k]);
      w = std::max(0.0, vk.dot(d) / d.squaredNorm());
    }
    viol = std::max(viol, group_violation(b, vk, g.gamma[k], w * g.weights[k]));
    wsum += w;
  }
  return std::max(viol, std::abs(wsum - 1.0));
}

// ---- exact LP route, overlapping polyhedral groupings with gamma0 = 1 ----

bool lp_representable(const Eigen::VectorXd& beta, const Grouping& g) {
  if (g.gamma0 != 1.0) return false;
  for (size_t k = 0; k < g.groups.size(); ++k) {
    if (g.groups[k].size() == 1) continue;
    if (group_is_zero(subvec(beta, g.groups[k])) && !std::isinf(g.gamma[k]) &&
        g.gamma[k] != 1.0)
      return false;
  }
  return true;
}

double lp_violation(const Eigen::VectorXd& beta, const Grouping& g,
                    const Eigen::VectorXd& v) {
  const int p = int(beta.size());
  struct Col {
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Col> cols;
  Eigen::VectorXd coord_rhs = v;
  std::vector<double> extra_rhs;
  const auto extra_row = [&](double rhs) {
    extra_rhs.push_back(rhs);
    return p + int(extra_rhs.size()) - 1;
  };
  const auto box_rows = [&](const std::vector<int>& idx, double bound) {
    // |u_j| <= bound per coordinate via u = a - b, a + b + slack = bound
    for (int j : idx) {
      const int r = extra_row(bound);
      cols.push_back({{{j, 1.0}, {r, 1.0}}});
      cols.push_back({{{j, -1.0}, {r, 1.0}}});
      cols.push_back({{{r, 1.0}}});
    }
  };

  for (size_t k = 0; k < g.groups.size(); ++k) {
    const auto& grp = g.groups[k];
    const Eigen::VectorXd b = subvec(beta, grp);
    const double alpha = g.weights[k];
    if (group_is_zero(b)) {
      if (std::isinf(g.gamma[k]) || grp.size() == 1) {
        // ||u||_1 <= alpha
        const int r = extra_row(alpha);
        for (int j : grp) {
          cols.push_back({{{j, 1.0}, {r, 1.0}}});
          cols.push_back({{{j, -1.0}, {r, 1.0}}});
        }
        cols.push_back({{{r, 1.0}}});
      } else {
        box_rows(grp, alpha);
      }
      continue;
    }
    if (std::isinf(g.gamma[k])) {
      std::vector<int> s;
      std::vector<double> sgn;
      max_set(b, &s, &sgn);
      const int r = extra_row(alpha);
      for (size_t i = 0; i < s.size(); ++i)
        cols.push_back({{{grp[s[i]], sgn[i]}, {r, 1.0}}});
      continue;
    }
    if (g.gamma[k] == 1.0) {
      std::vector<int> boxes;
      for (int i = 0; i < b.size(); ++i) {
        if (std::abs(b[i]) > kink_tol)
          coord_rhs[grp[i]] -= alpha * (b[i] >= 0 ? 1.0 : -1.0);
        else
          boxes.push_back(grp[i]);
      }
      box_rows(boxes, alpha);
      continue;
    }
    const Eigen::VectorXd u = alpha * norm_gradient(b, g.gamma[k]);
    for (int i = 0; i < b.size(); ++i) coord_rhs[grp[i]] -= u[i];
  }

  const int rows = p + int(extra_rhs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols.size());
  for (size_t c = 0; c < cols.size(); ++c)
    for (const auto& [r, val] : cols[c].entries) a(r, int(c)) = val;
  Eigen::VectorXd rhs(rows);
  rhs.head(p) = coord_rhs;
  for (size_t i = 0; i < extra_rhs.size(); ++i) rhs[p + int(i)] = extra_rhs[i];
  return detail::phase1_infeasibility(a, rhs);
}

// ---- Frank-Wolfe fallback, overlapping gamma0 = 1, any inner norms -------

// Best feasible u^k for maximizing <r, u> over group k's piece at beta.
Eigen::VectorXd group_lmo(const Eigen::VectorXd& b, const Eigen::VectorXd& r,
                          double gamma, double alpha) {
  const int q = int(b.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
  if (group_is_zero(b)) {
    // alpha-ball of the dual norm
    if (gamma == 1.0) {
      for (int j = 0; j < q; ++j) u[j] = alpha * (r[j] >= 0 ? 1.0 : -1.0);
    } else if (std::isinf(gamma)) {
      int jm = 0;
      r.cwiseAbs().maxCoeff(&jm);
      u[jm] = alpha * (r[jm] >= 0 ? 1.0 : -1.0);
    } else {
      const double nrm = vector_norm(r, gamma);
      if (nrm <= 0) return u;
      for (int j = 0; j < q; ++j)
        u[j] = alpha * (r[j] >= 0 ? 1.0 : -1.0) *
               std::pow(std::abs(r[j]) / nrm, gamma - 1.0);
    }
    return u;
  }
  if (std::isinf(gamma)) {
    std::vector<int> s;
    std::vector<double> sgn;
    max_set(b, &s, &sgn);
    int best = 0;
    for (size_t i = 1; i < s.size(); ++i)
      if (r[s[i]] * sgn[i] > r[s[best]] * sgn[best]) best = int(i);
    u[s[best]] = alpha * sgn[best];
    return u;
  }
  if (gamma == 1.0) {
    for (int j = 0; j < q; ++j) {
      if (std::abs(b[j]) > kink_tol)
        u[j] = alpha * (b[j] >= 0 ? 1.0 : -1.0);
      else
        u[j] = alpha * (r[j] >= 0 ? 1.0 : -1.0);
    }
    return u;
  }
  return alpha * norm_gradient(b, gamma);
}

double frank_wolfe_violation(const Eigen::VectorXd& beta, const Grouping& g,
                             const Eigen::VectorXd& v) {
  const int kk = int(g.groups.size());
  std::vector<Eigen::VectorXd> u(kk);
  Eigen::VectorXd r = v;
  std::vector<char> covered(beta.size(), 0);
  for (const auto& grp : g.groups)
    for (int j : grp) covered[j] = 1;
  for (int j = 0; j < beta.size(); ++j)
    if (!covered[j]) r[j] = 0.0;  // uncovered coordinates counted separately

  for (int k = 0; k < kk; ++k) {
    const Eigen::VectorXd b = subvec(beta, g.groups[k]);
    u[k] = group_lmo(b, subvec(r, g.groups[k]), g.gamma[k], g.weights[k]);
    for (size_t i = 0; i < g.groups[k].size(); ++i) r[g.groups[k][i]] -= u[k][i];
  }
  // block-coordinate Frank-Wolfe with exact line search per block
  for (int sweep = 0; sweep < 2000; ++sweep) {
    double moved = 0.0;
    for (int k = 0; k < kk; ++k) {
      const auto& grp = g.groups[k];
      const Eigen::VectorXd b = subvec(beta, grp);
      const Eigen::VectorXd rk = subvec(r, grp);
      const Eigen::VectorXd d = group_lmo(b, rk, g.gamma[k], g.weights[k]) - u[k];
      const double dd = d.squaredNorm();
      if (dd <= 0) continue;
      const double t = std::clamp(rk.dot(d) / dd, 0.0, 1.0);
      if (t <= 0) continue;
      u[k] += t * d;
      for (size_t i = 0; i < grp.size(); ++i) r[grp[i]] -= t * d[i];
      moved += t * t * dd;
    }
    if (moved < 1e-18) break;
  }
  double viol = r.lpNorm<Eigen::Infinity>();
  for (int j = 0; j < beta.size(); ++j)
    if (!covered[j]) viol = std::max(viol, std::abs(v[j]));
  return viol;
}

}  // namespace

double subgradient_violation(const Eigen::VectorXd& beta, const Grouping& g,
                             const Eigen::VectorXd& candidate) {
  validate_grouping(g, int(beta.size()));
  require(candidate.size() == beta.size(), errc::dimension_mismatch,
          "candidate length must match beta");
  if (!groups_overlap(g)) return nonoverlap_violation(beta, g, candidate);
  require(g.gamma0 == 1.0, errc::wrong_norms,
          "overlapping groups are only supported with outer norm 1");
  if (lp_representable(beta, g)) return lp_violation(beta, g, candidate);
  return frank_wolfe_violation(beta, g, candidate);
}

bool subgradient_set_contains(const Eigen::VectorXd& beta, const Grouping& g,
                              const Eigen::VectorXd& candidate, double tol) {
  return subgradient_violation(beta, g, candidate) <= tol;
}

}  // namespace cap
