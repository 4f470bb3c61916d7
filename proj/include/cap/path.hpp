#pragma once

#include <string>
#include <vector>

#include "cap/hierarchy.hpp"
#include "cap/penalty.hpp"

namespace cap {

// Numeric conventions shared by the exact tracers.
inline constexpr double path_zero_tol = 1e-10;   // numeric zero for correlations/coefficients
inline constexpr double path_tie_tol = 1e-12;    // simultaneous-event tie window
inline constexpr double path_cond_tol = 1e10;    // condition bound before degenerate_design

// Per-group coordinate split at a breakpoint. r: coordinates pinned at the
// group max with sign matching their residual correlation; u: coordinates with
// residual correlation exactly zero, moving freely below the max.
struct GroupState {
  int group = 0;
  std::vector<int> r;
  std::vector<int> u;
};

struct Breakpoint {
  double lambda = 0.0;
  Eigen::VectorXd beta;
  std::vector<int> active_groups;        // sorted; meaning depends on solver (see tracers)
  std::vector<GroupState> group_state;   // one entry per active group
  Eigen::VectorXi signs;                 // sign(x'(y - x beta)), 0 within path_zero_tol
  int df = 0;   // free parameters on the segment from the previous breakpoint down to this one
};

struct RegularizationPath {
  std::vector<Breakpoint> breakpoints;   // lambda strictly decreasing
  std::string solver;                    // "lasso", "ilasso", "icap", "hicap", "blasso"
  std::uint64_t fingerprint = 0;
  bool approximate = false;              // true only for blasso
  double eps = 0.0, xi = 0.0;            // blasso configuration echo
};

// beta at an arbitrary lambda. Exact paths interpolate linearly between
// breakpoints (exact: beta(lambda) is piecewise linear); above the first
// breakpoint the first beta is returned (all zero), below the last the last.
// Approximate paths return the breakpoint on the more-regularized side.
Eigen::VectorXd interpolate(const RegularizationPath& path, double lambda);

// Segment-constant df at lambda: the df of the highest-lambda breakpoint with
// lambda <= the query (the query lies in that breakpoint's segment). Above the
// first breakpoint the first df applies, below the last the last.
int path_df(const RegularizationPath& path, double lambda);

// L1 penalty. Emits a breakpoint per active-set change; coordinates enter at
// |x_j'(y-x beta)| = lambda and leave when their coefficient crosses zero.
// active_groups holds active coordinate indices; df = active count.
RegularizationPath lasso_path(const Dataset& ds);

// Max-norm penalty T = ||beta||_inf. active_groups is {0} once any coordinate
// moves; group_state[0] splits coordinates into max-pinned r and free u;
// df = 1 + |u|. First breakpoint sits at lambda_0 = ||x'y||_1 with beta = 0.
RegularizationPath ilasso_path(const Dataset& ds);

// Nonoverlapping groups, gamma0 = 1, all group norms infinity (weights may
// differ from 1; the entry condition for group k is ||x_{G_k}'r||_1 = lambda*alpha_k).
// Indices not covered by any group are treated as weight-1 singleton groups.
// Raises overlapping_groups / wrong_norms when the grouping does not match.
RegularizationPath icap_path(const Dataset& ds, const Grouping& g);

// Exact tracer for the compiled tree penalty (gamma0 = 1, all node norms
// infinity, unit weights). Maintains a partition of the tree into supernodes;
// active_groups lists the tree nodes inside active supernodes, group_state
// carries one entry per active supernode (group = supernode root node).
// Raises not_a_tree / wrong_norms on other graphs or norms.
RegularizationPath hicap_path(const Dataset& ds, const HierarchyGraph& graph);

// Max KKT violation of the interpolated solution at one lambda:
// subgradient_violation(beta_hat, g, x'(y - x beta_hat)/lambda) scaled back by
// lambda (at lambda = 0 it is ||x'(y-x beta_hat)||_inf).
double verify_kkt(const RegularizationPath& path, const Dataset& ds, const Grouping& g,
                  double lambda);

// Convenience: max violation over every breakpoint lambda of the path.
double verify_kkt_breakpoints(const RegularizationPath& path, const Dataset& ds,
                              const Grouping& g);

}  // namespace cap
