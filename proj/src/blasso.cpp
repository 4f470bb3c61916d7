#include "cap/blasso.hpp"

#include <algorithm>
#include <cmath>

#include "cap/dataset.hpp"

namespace cap {

namespace {

Eigen::VectorXi corr_signs(const Eigen::VectorXd& c) {
  Eigen::VectorXi s(c.size());
  for (int j = 0; j < c.size(); ++j)
    s[j] = std::abs(c[j]) <= path_zero_tol ? 0 : (c[j] > 0 ? 1 : -1);
  return s;
}

// Penalty bookkeeping with incremental single-coordinate updates.
struct PenaltyTracker {
  const Grouping* g;
  std::vector<std::vector<int>> groups_of;  // predictor -> group ids
  Eigen::VectorXd norms;                    // N_k including the weight
  double total = 0.0;

  PenaltyTracker(const Grouping& grouping, int p) : g(&grouping) {
    groups_of.resize(p);
    for (size_t k = 0; k < g->groups.size(); ++k)
      for (int j : g->groups[k]) groups_of[j].push_back(int(k));
    norms = Eigen::VectorXd::Zero(g->groups.size());
  }

  double group_norm(const Eigen::VectorXd& beta, int k) const {
    Eigen::VectorXd v(g->groups[k].size());
    for (size_t i = 0; i < g->groups[k].size(); ++i) v[i] = beta[g->groups[k][i]];
    return g->weights[k] * vector_norm(v, g->gamma[k]);
  }

  // total after beta_j -> newval, without committing
  double total_if(Eigen::VectorXd& beta, int j, double newval) const {
    const double old = beta[j];
    beta[j] = newval;
    double t;
    if (g->gamma0 == 1.0) {
      t = total;
      for (int k : groups_of[j]) t += group_norm(beta, k) - norms[k];
    } else {
      Eigen::VectorXd nn = norms;
      for (int k : groups_of[j]) nn[k] = group_norm(beta, k);
      t = vector_norm(nn, g->gamma0);
    }
    beta[j] = old;
    return t;
  }

  void commit(const Eigen::VectorXd& beta, int j) {
    for (int k : groups_of[j]) norms[k] = group_norm(beta, k);
    total = vector_norm(norms, g->gamma0);
  }
};

}  // namespace

RegularizationPath blasso_path(const Dataset& ds, const Grouping& g,
                               const BlassoConfig& cfg) {
  const int n = ds.n();
  const int p = ds.p();
  require(ds.standardized || x_standardized(ds), errc::data_error,
          "design columns must be standardized");
  validate_grouping(g, p);

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  const Eigen::VectorXd c0 = ds.x.transpose() * ds.y;
  const double eps = cfg.eps > 0 ? cfg.eps : 1e-2 * c0.lpNorm<Eigen::Infinity>() / n;
  const double xi = cfg.xi >= 0 ? cfg.xi : eps * eps;

  RegularizationPath path;
  path.solver = "blasso";
  path.fingerprint = dataset_fingerprint(ds);
  path.approximate = true;
  path.eps = eps;
  path.xi = xi;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (c0.lpNorm<Eigen::Infinity>() <= path_zero_tol || !(eps > 0)) {
    path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
    return path;
  }

  PenaltyTracker tracker(g, p);
  Eigen::VectorXd grad = -c0;  // gradient of (1/2)||y - x beta||^2
  double lambda = -1.0;        // set by the first forward step
  double lambda_floor = cfg.lambda_floor;

  const auto push = [&](double lam) {
    std::vector<int> act;
    for (int j = 0; j < p; ++j)
      if (std::abs(beta[j]) > 0.5 * eps) act.push_back(j);
    path.breakpoints.push_back(
        {lam, beta, act, {}, corr_signs(-grad), int(act.size())});
  };

  for (long step = 0; step < cfg.max_steps; ++step) {
    // descent candidate: steepest single +-eps move under L + lambda T.
    // Trying both signs on every coordinate matters for gamma > 1 groups,
    // where growing a zero coordinate of an active group costs almost no
    // penalty; shrink-only steps never reach those solutions.
    int desc_j = -1;
    double desc_obj = -xi;
    double desc_move = 0.0;
    if (lambda > 0) {
      for (int j = 0; j < p; ++j) {
        for (const double s : {eps, -eps}) {
          const double dl = s * grad[j] + 0.5 * s * s * gram(j, j);
          const double dt = tracker.total_if(beta, j, beta[j] + s) - tracker.total;
          const double dobj = dl + lambda * dt;
          if (dobj < desc_obj) {
            desc_obj = dobj;
            desc_j = j;
            desc_move = s;
          }
        }
      }
    }

    int j_star;
    double move, dl, dt;
    if (desc_j >= 0) {
      j_star = desc_j;
      move = desc_move;
      dl = move * grad[j_star] + 0.5 * move * move * gram(j_star, j_star);
      dt = 0.0;  // lambda stays put on descent steps
    } else {
      j_star = 0;
      double best = 0.0;
      for (int j = 0; j < p; ++j) {
        const double cand = -eps * std::abs(grad[j]) + 0.5 * eps * eps * gram(j, j);
        if (j == 0 || cand < best) {
          best = cand;
          j_star = j;
        }
      }
      if (best >= 0.0) {
        // resolution end: no +-eps move reduces the loss, so lambda can never
        // relax again and further steps would oscillate in place
        if (lambda < 0) path.breakpoints.push_back({0.0, beta, {}, {}, corr_signs(c0), 0});
        return path;
      }
      move = grad[j_star] > 0 ? -eps : eps;
      dl = best;
      dt = tracker.total_if(beta, j_star, beta[j_star] + move) - tracker.total;
    }

    beta[j_star] += move;
    grad += move * gram.col(j_star);
    tracker.commit(beta, j_star);

    if (desc_j < 0 && dt > 0 && dl < 0) {
      const double ratio = -dl / dt;
      if (lambda < 0) {  // first step fixes the head of the path
        lambda = ratio;
        if (lambda_floor <= 0) lambda_floor = 1e-3 * lambda;
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(p);
        path.breakpoints.push_back({lambda, zero, {}, {}, corr_signs(c0), 0});
      } else if (ratio < lambda) {
        lambda = ratio;
        push(lambda);
      }
    }
    if (lambda > 0 && lambda <= lambda_floor) return path;
  }
  fail(errc::step_budget_exceeded, "lambda floor not reached within max_steps");
}

}  // namespace cap
