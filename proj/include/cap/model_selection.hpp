#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cap/path.hpp"

namespace cap {

// Unbiased-risk degrees of freedom read off a breakpoint:
//   lasso: number of nonzero coefficients;
//   ilasso: 0 at the all-zero head, else 1 + |u|;
//   icap / hicap: |active groups| + sum of |u| over active groups
// (for hicap "groups" are supernodes; the hicap value is experimental and
// validated only against the Monte-Carlo oracle). Raises unsupported_solver
// for approximate (blasso) paths.
int df_estimate(const Breakpoint& bp, const std::string& solver);

struct SelectionResult {
  double lambda = 0.0;
  std::string criterion;                      // "aicc" or "cv"
  std::vector<double> candidate_lambdas;      // evaluated grid, decreasing
  std::vector<double> criterion_values;       // same order
  std::vector<int> candidate_df;              // -1 where unavailable
  Eigen::VectorXd beta;                       // full-data solution at lambda
};

// Corrected AIC over the path's breakpoints:
//   AICc = (n/2) log(RSS) + (n/2) (1 + k/n) / (1 - (k+2)/n),  k = df estimate.
// Breakpoints with k >= n-2 are excluded (correction blows up); ties pick the
// larger lambda. Raises empty_candidate_set if nothing survives,
// unsupported_solver via df_estimate for approximate paths.
SelectionResult aicc_select(const RegularizationPath& path, const Dataset& ds);

using PathSolver = std::function<RegularizationPath(const Dataset&)>;

enum class CvScheme { random, balanced };

// k-fold cross-validation. Folds are row subsets; "random" assigns rows to
// folds by a seeded shuffle, "balanced" requires n to be `folds` stacked
// replicate blocks (n % folds == 0, block size n/folds) and puts, for every
// within-block position, exactly one replicate in each fold (seeded assignment).
// The lambda grid is the union of per-fold breakpoint lambdas, geometrically
// thinned to at most 200 points; prediction error is the held-out squared
// error of the interpolated fold solution; ties pick the larger lambda. The
// returned beta is the full-data fit at the chosen lambda.
// Raises fold_too_small (some training fold would have < 2 rows or folds < 2),
// scheme_unavailable (balanced layout impossible).
SelectionResult cross_validate(const Dataset& ds, const PathSolver& solver, int folds,
                               CvScheme scheme, std::uint64_t seed);

// Monte-Carlo divergence oracle: holds the design fixed, redraws
// y = x beta_true + sigma*eps `draws` times, refits the path, and estimates
// df(lambda) = sum_i cov(mu_hat_i, y_i) / sigma^2. Returns the estimate, its
// Monte-Carlo standard error, and the paired statistics against df_estimate
// (mean difference and its standard error) so calibration tests can compare.
struct SteinEstimate {
  double df = 0.0;
  double se = 0.0;
  double mean_df_estimate = 0.0;   // mean of df_estimate over draws
  double diff = 0.0;               // mean(per-draw stein stat - df_estimate)
  double diff_se = 0.0;
};
SteinEstimate stein_df_oracle(const Dataset& design_template, const Eigen::VectorXd& beta_true,
                              double sigma, double lambda, const PathSolver& solver,
                              const std::string& solver_tag, int draws, std::uint64_t seed);

}  // namespace cap
