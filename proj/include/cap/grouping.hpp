#pragma once

#include <limits>
#include <vector>

#include "cap/dataset.hpp"
#include "cap/error.hpp"

namespace cap {

inline constexpr double inf_norm = std::numeric_limits<double>::infinity();

// Penalty structure: groups of 0-based predictor indices (overlap allowed),
// an outer norm gamma0 and per-group norms gamma_k (finite >= 1 or infinity),
// and positive per-group weights alpha_k. The penalty is
//   T(beta) = || (alpha_k * ||beta_{G_k}||_{gamma_k})_k ||_{gamma0}.
// Indices absent from every group are unpenalized.
struct Grouping {
  std::vector<std::vector<int>> groups;
  double gamma0 = 1.0;
  std::vector<double> gamma;    // one entry per group
  std::vector<double> weights;  // one entry per group, > 0

  std::size_t size() const { return groups.size(); }
};

// Structural checks: nonempty groups, indices in [0,p), norms >= 1, weights > 0,
// gamma/weights arrays matching groups. Raises empty_group, index_out_of_range,
// invalid_norm (norm < 1 or NaN), nonpositive_weight, dimension_mismatch.
void validate_grouping(const Grouping& g, int p);

bool groups_overlap(const Grouping& g);
// True when the groups partition {0,...,p-1}.
bool groups_partition(const Grouping& g, int p);

// One group per predictor, all with the given norm and weight 1.
Grouping singleton_grouping(int p, double gamma = 2.0, double gamma0 = 1.0);
// A single group covering all predictors.
Grouping whole_grouping(int p, double gamma, double gamma0 = 1.0);

// Rescales predictors so groups of different sizes compete on equal footing:
// every predictor in G_k is divided by q_k^(1/gbar*) where q_k = |G_k| and
// gbar* = gbar/(gbar-1) is the conjugate of the (uniform) group norm gbar.
// Requires a standardized dataset, nonoverlapping groups, and a uniform group
// norm gbar > 1; raises norm_mismatch (mixed norms), invalid_norm (gbar == 1,
// conjugate unbounded), overlapping_groups. Scale factors are composed into
// col_scale so raw-unit back-mapping stays exact.
Dataset group_normalize(const Dataset& ds, const Grouping& g);

}  // namespace cap
