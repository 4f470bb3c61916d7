#include <algorithm>
#include <cmath>

#include "cap/internal/path_common.hpp"
#include "cap/path.hpp"

namespace cap::detail {

GramSolve solve_gram(const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs) {
  GramSolve out;
  if (g.rows() == 0) {
    out.z.resize(0);
    return out;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (!(dmax > 0.0) || dmin * path_cond_tol < dmax || ldlt.info() != Eigen::Success) {
    out.ok = false;
    return out;
  }
  out.z = ldlt.solve(rhs);
  if (!out.z.allFinite()) out.ok = false;
  return out;
}

void EventQueue::offer(double delta, int kind, int a, int b) {
  if (!std::isfinite(delta) || delta < -path_tie_tol) return;
  cands_.push_back({std::max(delta, 0.0), kind, a, b});
}

std::optional<EventQueue::Cand> EventQueue::pick() const {
  if (cands_.empty()) return std::nullopt;
  double best = cands_.front().delta;
  for (const auto& c : cands_) best = std::min(best, c.delta);
  for (const auto& c : cands_)
    if (c.delta <= best + path_tie_tol) return c;
  return std::nullopt;
}

std::optional<double> first_piecewise_root(const Eigen::VectorXd& c,
                                           const Eigen::VectorXd& dc,
                                           const Eigen::VectorXd& coef, double aff0,
                                           double aff1, double min_delta, double bound) {
  if (!(bound > min_delta)) return std::nullopt;
  std::vector<double> kinks;
  kinks.push_back(std::max(min_delta, 0.0));
  for (int i = 0; i < c.size(); ++i) {
    if (dc[i] == 0.0) continue;
    const double k = -c[i] / dc[i];
    if (k > kinks.front() && k < bound) kinks.push_back(k);
  }
  kinks.push_back(bound);
  std::sort(kinks.begin(), kinks.end());

  const auto eval = [&](double t) {
    double f = aff0 + aff1 * t;
    for (int i = 0; i < c.size(); ++i) f += coef[i] * std::abs(c[i] + dc[i] * t);
    return f;
  };

  double fa = eval(kinks.front());
  if (std::abs(fa) <= path_tie_tol && min_delta <= 0.0) return kinks.front();
  for (size_t s = 0; s + 1 < kinks.size(); ++s) {
    const double a = kinks[s];
    const double b = kinks[s + 1];
    const double fb = eval(b);
    if (fa == 0.0) return a;
    if ((fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0)) {
      const double root = a + (b - a) * fa / (fa - fb);
      return std::clamp(root, a, b);
    }
    fa = fb;
  }
  return std::nullopt;
}

}  // namespace cap::detail

namespace cap {

namespace {

// Index of the breakpoint whose segment [lambda_t, lambda_{t-1}) contains the
// query: the highest-lambda breakpoint with lambda <= query, clamped to ends.
size_t segment_index(const RegularizationPath& path, double lambda) {
  const auto& bps = path.breakpoints;
  require(!bps.empty(), errc::invalid_shape, "empty path");
  if (lambda >= bps.front().lambda) return 0;
  for (size_t t = 1; t < bps.size(); ++t)
    if (bps[t].lambda <= lambda) return t;
  return bps.size() - 1;
}

}  // namespace

Eigen::VectorXd interpolate(const RegularizationPath& path, double lambda) {
  const auto& bps = path.breakpoints;
  require(!bps.empty(), errc::invalid_shape, "empty path");
  if (lambda >= bps.front().lambda) return bps.front().beta;
  if (lambda <= bps.back().lambda) return bps.back().beta;
  size_t t = 1;
  while (bps[t].lambda > lambda) ++t;
  if (path.approximate) return bps[t - 1].beta;  // more-regularized side
  const double hi = bps[t - 1].lambda;
  const double lo = bps[t].lambda;
  const double w = (hi - lambda) / (hi - lo);
  return (1.0 - w) * bps[t - 1].beta + w * bps[t].beta;
}

int path_df(const RegularizationPath& path, double lambda) {
  return path.breakpoints[segment_index(path, lambda)].df;
}

double verify_kkt(const RegularizationPath& path, const Dataset& ds, const Grouping& g,
                  double lambda) {
  const Eigen::VectorXd beta = interpolate(path, lambda);
  const Eigen::VectorXd grad = ds.x.transpose() * (ds.y - ds.x * beta);
  if (lambda <= 0.0) return grad.lpNorm<Eigen::Infinity>();
  return lambda * subgradient_violation(beta, g, grad / lambda);
}

double verify_kkt_breakpoints(const RegularizationPath& path, const Dataset& ds,
                              const Grouping& g) {
  double worst = 0.0;
  for (const auto& bp : path.breakpoints)
    worst = std::max(worst, verify_kkt(path, ds, g, bp.lambda));
  return worst;
}

}  // namespace cap
