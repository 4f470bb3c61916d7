#pragma once

#include "cap/path.hpp"

namespace cap {

// Approximate path algorithm for an arbitrary grouping (any gamma0 >= 1,
// group norms >= 1, overlap allowed).
//
// Update rule (documented here because it is what this implementation does):
//   - start at beta = 0; the first step is the forward step minimizing the loss,
//     and lambda starts at (L(0) - L(beta_1)) / (T(beta_1) - T(0));
//   - descent candidate: the single move beta_j += s, s = +-eps, over all
//     coordinates, minimizing L + lambda*T. Taken when it improves the
//     penalized objective by more than xi (lambda unchanged). For gamma = 1
//     only shrinking moves can pass this test; for smoother group norms a
//     growing move inside an active group can too, which is what lets the
//     iterate bend away from pure coordinate directions;
//   - otherwise the forward step (j, s) minimizing L(beta + s*eps*e_j) over
//     s = +-eps is taken, and lambda <- min(lambda, (L_old - L_new)/(T_new - T_old))
//     whenever the penalty increases; relaxing lambda is what moves the path forward;
//   - stops once lambda <= lambda_floor, or at the resolution end of the path:
//     when no +-eps move reduces the loss and no descent step improves the
//     penalized objective, every further step is a pure oscillation, so the
//     path is complete at this step size. step_budget_exceeded is raised only
//     if max_steps runs out before either stop.
//
// A breakpoint is emitted at every lambda decrease. The result is marked
// approximate: interpolation is step-wise, coefficients are multiples of eps,
// and KKT checks should use tolerances of order eps.
struct BlassoConfig {
  double eps = 0.0;           // <= 0: default 1e-2 * ||x'y||_inf / n
  double xi = -1.0;           // < 0: default eps^2 (see below)
  long max_steps = 500000;
  double lambda_floor = 0.0;  // <= 0: default 1e-3 * initial lambda
};
// xi trades accuracy for progress: a descent/forward oscillation lowers
// lambda by about xi/eps per round, so xi = eps^2 keeps the relaxation moving
// at the eps scale while still vanishing faster than the step size.

RegularizationPath blasso_path(const Dataset& ds, const Grouping& g,
                               const BlassoConfig& cfg = {});

}  // namespace cap
