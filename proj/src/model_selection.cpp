#include "cap/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cap/dataset.hpp"
#include "cap/rng.hpp"

namespace cap {

int df_estimate(const Breakpoint& bp, const std::string& solver) {
  if (solver == "lasso" || solver == "ilasso" || solver == "icap" || solver == "hicap")
    return bp.df;
  fail(errc::unsupported_solver, "no unbiased df read-off for solver '" + solver + "'");
}

SelectionResult aicc_select(const RegularizationPath& path, const Dataset& ds) {
  const double n = double(ds.n());
  SelectionResult out;
  out.criterion = "aicc";
  int best = -1;
  double best_val = 0.0;
  for (const auto& bp : path.breakpoints) {
    const int k = df_estimate(bp, path.solver);
    if (k >= ds.n() - 2) continue;
    const double rss = (ds.y - ds.x * bp.beta).squaredNorm();
    if (rss <= 0.0) continue;
    const double val =
        0.5 * n * std::log(rss) + 0.5 * n * (1.0 + k / n) / (1.0 - (k + 2) / n);
    out.candidate_lambdas.push_back(bp.lambda);
    out.criterion_values.push_back(val);
    out.candidate_df.push_back(k);
    if (best < 0 || val < best_val) {  // ties keep the earlier (larger) lambda
      best = int(out.candidate_lambdas.size()) - 1;
      best_val = val;
    }
  }
  require(best >= 0, errc::empty_candidate_set, "no admissible breakpoint for AICc");
  out.lambda = out.candidate_lambdas[best];
  out.beta = interpolate(path, out.lambda);
  return out;
}

namespace {

Dataset row_subset(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.x.resize(int(rows.size()), ds.p());
  out.y.resize(int(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    out.x.row(int(i)) = ds.x.row(rows[i]);
    out.y[int(i)] = ds.y[rows[i]];
  }
  out.standardized = ds.standardized;
  out.col_mean = ds.col_mean;
  out.col_scale = ds.col_scale;
  out.y_mean = ds.y_mean;
  return out;
}

std::vector<int> fold_assignment(int n, int folds, CvScheme scheme, std::uint64_t seed) {
  std::vector<int> fold(n);
  if (scheme == CvScheme::random) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    auto rng = make_rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) fold[perm[i]] = i % folds;
    return fold;
  }
  // balanced: n = `folds` stacked blocks; rows sharing a within-block position
  // are replicates and spread over all folds
  require(n % folds == 0, errc::scheme_unavailable,
          "balanced folds need n divisible by the fold count");
  const int block = n / folds;
  for (int pos = 0; pos < block; ++pos) {
    std::vector<int> perm(folds);
    for (int b = 0; b < folds; ++b) perm[b] = b;
    auto rng = make_rng(mix_seed(seed, std::uint64_t(pos)));
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int b = 0; b < folds; ++b) fold[pos + b * block] = perm[b];
  }
  return fold;
}

// union of breakpoint lambdas, decreasing, geometrically thinned to max_pts
std::vector<double> lambda_grid(const std::vector<RegularizationPath>& paths,
                                size_t max_pts) {
  std::set<double> u;
  for (const auto& p : paths)
    for (const auto& bp : p.breakpoints) u.insert(bp.lambda);
  std::vector<double> grid(u.rbegin(), u.rend());
  if (grid.size() <= max_pts) return grid;

  std::vector<double> pos;
  for (double l : grid)
    if (l > 0) pos.push_back(l);
  const bool has_zero = pos.size() < grid.size();
  const double hi = pos.front();
  const double lo = std::max(pos.back(), hi * 1e-12);
  const size_t m = max_pts - (has_zero ? 1 : 0);
  std::set<double> keep;
  for (size_t i = 0; i < m; ++i) {
    const double target = hi * std::pow(lo / hi, double(i) / double(m - 1));
    size_t nearest = 0;
    double best = -1;
    for (size_t j = 0; j < pos.size(); ++j) {
      const double d = std::abs(std::log(pos[j]) - std::log(target));
      if (best < 0 || d < best) {
        best = d;
        nearest = j;
      }
    }
    keep.insert(pos[nearest]);
  }
  keep.insert(hi);
  if (has_zero) keep.insert(0.0);
  return {keep.rbegin(), keep.rend()};
}

}  // namespace

SelectionResult cross_validate(const Dataset& ds, const PathSolver& solver, int folds,
                               CvScheme scheme, std::uint64_t seed) {
  const int n = ds.n();
  require(folds >= 2, errc::fold_too_small, "need at least two folds");
  const auto fold = fold_assignment(n, folds, scheme, seed);

  std::vector<RegularizationPath> paths(folds);
  std::vector<std::vector<int>> test_rows(folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train;
    for (int i = 0; i < n; ++i) (fold[i] == f ? test_rows[f] : train).push_back(i);
    require(int(train.size()) >= 2, errc::fold_too_small,
            "training fold has fewer than two rows");
    paths[f] = solver(row_subset(ds, train));
  }

  const auto grid = lambda_grid(paths, 200);
  SelectionResult out;
  out.criterion = "cv";
  const RegularizationPath full = solver(ds);
  int best = -1;
  double best_val = 0.0;
  for (double lam : grid) {
    double err = 0.0;
    for (int f = 0; f < folds; ++f) {
      const Eigen::VectorXd b = interpolate(paths[f], lam);
      for (int i : test_rows[f]) {
        const double r = ds.y[i] - ds.x.row(i).dot(b);
        err += r * r;
      }
    }
    err /= n;
    out.candidate_lambdas.push_back(lam);
    out.criterion_values.push_back(err);
    out.candidate_df.push_back(full.approximate ? -1 : path_df(full, lam));
    if (best < 0 || err < best_val) {  // grid is decreasing: ties keep larger lambda
      best = int(out.candidate_lambdas.size()) - 1;
      best_val = err;
    }
  }
  require(best >= 0, errc::empty_candidate_set, "empty cross-validation grid");
  out.lambda = out.candidate_lambdas[best];
  out.beta = interpolate(full, out.lambda);
  return out;
}

SteinEstimate stein_df_oracle(const Dataset& design_template,
                              const Eigen::VectorXd& beta_true, double sigma,
                              double lambda, const PathSolver& solver,
                              const std::string& solver_tag, int draws,
                              std::uint64_t seed) {
  require(draws >= 2, errc::invalid_shape, "need at least two draws");
  require(sigma > 0, errc::invalid_shape, "sigma must be positive");
  const int n = design_template.n();
  const Eigen::VectorXd mu = design_template.x * beta_true;

  Eigen::MatrixXd ys(n, draws), fits(n, draws);
  Eigen::VectorXd dfhat(draws);
  for (int d = 0; d < draws; ++d) {
    auto rng = make_rng(mix_seed(seed, std::uint64_t(d)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset ds = design_template;
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) ds.y[i] = mu[i] + sigma * gauss(rng);
    ys.col(d) = ds.y;
    const RegularizationPath path = solver(ds);
    fits.col(d) = ds.x * interpolate(path, lambda);
    const auto& bps = path.breakpoints;
    size_t seg = 0;  // highest-lambda breakpoint with lambda <= query, clamped
    while (seg + 1 < bps.size() && bps[seg].lambda > lambda) ++seg;
    dfhat[d] = double(df_estimate(bps[seg], solver_tag));
  }

  const Eigen::VectorXd ybar = ys.rowwise().mean();
  const Eigen::VectorXd fbar = fits.rowwise().mean();
  const double dd = double(draws);
  Eigen::VectorXd psi(draws);
  for (int d = 0; d < draws; ++d)
    psi[d] = (fits.col(d) - fbar).dot(ys.col(d) - ybar) * dd / ((dd - 1.0) * sigma * sigma);

  SteinEstimate out;
  out.df = psi.mean();
  out.se = std::sqrt((psi.array() - out.df).square().sum() / (dd - 1.0) / dd);
  out.mean_df_estimate = dfhat.mean();
  const Eigen::VectorXd diff = psi - dfhat;
  out.diff = diff.mean();
  out.diff_se = std::sqrt((diff.array() - out.diff).square().sum() / (dd - 1.0) / dd);
  return out;
}

}  // namespace cap
