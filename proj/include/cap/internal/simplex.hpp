#pragma once

#include <Eigen/Dense>

namespace cap::detail {

// Minimal artificial mass for {Ax = b, x >= 0}; zero iff the system is feasible.
double phase1_infeasibility(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace cap::detail
