#include "cap/dataset.hpp"

#include <cmath>

namespace cap {

Dataset standardize(const Dataset& raw) {
  const Eigen::Index n = raw.x.rows(), p = raw.x.cols();
  require(raw.y.size() == n, errc::dimension_mismatch, "x rows != y length");
  require(n >= 2, errc::dimension_mismatch, "need at least 2 rows");

  Dataset out = raw;
  if (out.col_mean.size() != p) {
    out.col_mean = Eigen::VectorXd::Zero(p);
    out.col_scale = Eigen::VectorXd::Ones(p);
  }

  const double ym = raw.y.mean();
  out.y = raw.y.array() - ym;
  out.y_mean = raw.y_mean + ym;

  for (Eigen::Index j = 0; j < p; ++j) {
    const double m = raw.x.col(j).mean();
    const double var = (raw.x.col(j).array() - m).square().sum() / double(n);
    require(var > 1e-24, errc::constant_column, "column " + std::to_string(j) + " is constant");
    const double s = std::sqrt(var);
    out.x.col(j) = (raw.x.col(j).array() - m) / s;
    // compose with any transform already recorded
    out.col_mean[j] = raw.col_mean.size() == p ? raw.col_mean[j] + m * raw.col_scale[j] : m;
    out.col_scale[j] = raw.col_scale.size() == p ? raw.col_scale[j] * s : s;
  }
  out.standardized = true;
  return out;
}

bool x_standardized(const Dataset& ds, double tol) {
  const Eigen::Index n = ds.x.rows();
  if (n < 2) return false;
  for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
    const double m = ds.x.col(j).mean();
    const double var = (ds.x.col(j).array() - m).square().sum() / double(n);
    if (std::abs(m) > tol || std::abs(var - 1.0) > tol) return false;
  }
  return true;
}

Eigen::VectorXd to_raw_coefficients(const Dataset& ds, const Eigen::VectorXd& beta_std) {
  require(beta_std.size() == ds.p(), errc::dimension_mismatch, "beta length != p");
  if (ds.col_scale.size() != ds.p()) return beta_std;
  return beta_std.array() / ds.col_scale.array();
}

double raw_intercept(const Dataset& ds, const Eigen::VectorXd& beta_std) {
  const Eigen::VectorXd raw = to_raw_coefficients(ds, beta_std);
  double b0 = ds.y_mean;
  if (ds.col_mean.size() == ds.p()) b0 -= raw.dot(ds.col_mean);
  return b0;
}

std::uint64_t dataset_fingerprint(const Dataset& ds) {
  std::uint64_t h = 1469598103934665603ULL;
  auto eat = [&h](const void* data, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t n = ds.x.rows(), p = ds.x.cols();
  eat(&n, sizeof n);
  eat(&p, sizeof p);
  eat(ds.x.data(), sizeof(double) * std::size_t(ds.x.size()));
  eat(ds.y.data(), sizeof(double) * std::size_t(ds.y.size()));
  return h;
}

}  // namespace cap
