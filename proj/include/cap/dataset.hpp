#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cap/error.hpp"

namespace cap {

// Regression data plus the affine transform that produced it from the raw
// inputs. Solvers assume columns of x have mean 0 and variance 1 (variance
// with denominator n, so diag(x'x) == n) and that no intercept is fit.
struct Dataset {
  Eigen::MatrixXd x;  // n rows, p columns
  Eigen::VectorXd y;  // n

  bool standardized = false;
  // Recorded by standardize()/group_normalize() so coefficients can be mapped
  // back to raw units: x_std[:,j] = (x_raw[:,j] - col_mean[j]) / col_scale[j].
  Eigen::VectorXd col_mean;
  Eigen::VectorXd col_scale;
  double y_mean = 0.0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

// Centers y and centers/rescales every column of x to variance exactly 1
// (population convention, denominator n). Idempotent up to 1e-10: feeding an
// already standardized dataset back in returns it unchanged and composes the
// recorded transforms. Raises constant_column if some column has zero variance,
// dimension_mismatch if x and y disagree on n or n < 2.
Dataset standardize(const Dataset& raw);

// True when every column of x has mean within tol of 0 and variance within
// tol of 1. Solvers only require this column condition; y may be uncentered
// (the Stein oracle relies on fitting raw response draws).
bool x_standardized(const Dataset& ds, double tol = 1e-8);

// Maps coefficients for a standardized dataset back to raw units. The
// intercept completing the raw-unit model is y_mean - sum_j beta_raw_j*col_mean[j].
Eigen::VectorXd to_raw_coefficients(const Dataset& ds, const Eigen::VectorXd& beta_std);
double raw_intercept(const Dataset& ds, const Eigen::VectorXd& beta_std);

// FNV-1a over dimensions and the exact bytes of x and y; identifies the
// dataset a serialized path was traced on.
std::uint64_t dataset_fingerprint(const Dataset& ds);

}  // namespace cap
