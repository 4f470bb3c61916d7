#pragma once

#include <cstdint>
#include <vector>

#include "cap/dataset.hpp"
#include "cap/grouping.hpp"

namespace cap {

// d(i,j) = 1 - |corr(x_i, x_j)|, so strongly correlated predictors (either
// sign) are close. Raises constant_column when a column has zero variance.
Eigen::MatrixXd correlation_distance(const Eigen::MatrixXd& x);

// Classic PAM: BUILD seeds medoids greedily (first medoid minimizes total
// dissimilarity, each next one maximizes cost reduction), SWAP applies the
// best-improving (medoid, non-medoid) exchange until none improves. The seed
// only breaks exact cost ties (uniform choice among tied candidates).
// Raises invalid_k (k < 1 or k > p), invalid_shape (distances not square/symmetric
// with zero diagonal).
std::vector<int> pam_cluster(const Eigen::MatrixXd& distances, int k, std::uint64_t seed);

// Cluster labels -> grouping over predictors with the given norms/weight 1.
Grouping grouping_from_labels(const std::vector<int>& labels, double gamma = inf_norm,
                              double gamma0 = 1.0);

// Fraction of index pairs on which two partitions agree (same/different
// cluster), i.e. the Rand index.
double pair_agreement(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

double clustering_cost(const Eigen::MatrixXd& distances, const std::vector<int>& medoids);

}  // namespace cap
