#pragma once

#include <Eigen/Dense>

#include "cap/grouping.hpp"

namespace cap {

struct PenaltyValue {
  double total = 0.0;            // ||N||_{gamma0}
  Eigen::VectorXd group_norms;   // N_k = alpha_k * ||beta_{G_k}||_{gamma_k}
};

// ||v||_gamma for gamma in [1, inf]; gamma = inf gives max |v_i|.
double vector_norm(const Eigen::VectorXd& v, double gamma);

PenaltyValue evaluate_penalty(const Eigen::VectorXd& beta, const Grouping& g);

// (1/2) * ||y - x beta||^2 + lambda * T(beta). The 1/2 sets the lambda scale
// used everywhere: gradient of the loss is -x'(y - x beta).
double penalized_objective(const Dataset& ds, const Eigen::VectorXd& beta,
                           const Grouping& g, double lambda);

// Distance-like measure of how far `candidate` is from the subdifferential of
// T at beta (0 when inside). Nonoverlapping groupings use the exact chain-rule
// test per group; overlapping groupings with polyhedral norms (every gamma in
// {1, inf}, gamma0 = 1) use an exact phase-1 LP over decompositions
// candidate = sum_k u^k; remaining overlapping cases fall back to Frank-Wolfe
// on min ||candidate - sum_k u^k||, accurate to ~1e-6.
double subgradient_violation(const Eigen::VectorXd& beta, const Grouping& g,
                             const Eigen::VectorXd& candidate);

// Membership test at the default tolerance on the violation measure.
bool subgradient_set_contains(const Eigen::VectorXd& beta, const Grouping& g,
                              const Eigen::VectorXd& candidate, double tol = 1e-8);

// |beta_j| <= kink_tol counts as an exact zero when classifying kinks.
inline constexpr double kink_tol = 1e-10;

}  // namespace cap
