#include <doctest.h>

#include "cap/path.hpp"
#include "designs.hpp"

using namespace cap;
using testsupport::orthogonal_dataset;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("path_ilasso") {

TEST_CASE("orthogonal design: pinned segment then release") {
  // x'x = 8*I, x'y = (3,1). lambda_0 = |3| + |1| = 4. On [2,4] both
  // coefficients share the max magnitude M = (4 - lambda)/16; at lambda = 2
  // the second correlation hits zero and its coefficient freezes at 1/8.
  const Dataset ds = orthogonal_dataset(vec2(3, 1));
  const RegularizationPath path = ilasso_path(ds);

  REQUIRE(path.breakpoints.size() == 3);
  CHECK(path.solver == "ilasso");
  CHECK(path.breakpoints[0].lambda == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(path.breakpoints[1].lambda == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(path.breakpoints[2].lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(path.breakpoints[0].df == 0);
  CHECK(path.breakpoints[1].df == 1);
  CHECK(path.breakpoints[2].df == 2);

  CHECK(path.breakpoints[0].beta.isZero(0));
  CHECK((path.breakpoints[1].beta - vec2(0.125, 0.125)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((path.breakpoints[2].beta - vec2(0.375, 0.125)).lpNorm<Eigen::Infinity>() < 1e-12);

  CHECK((interpolate(path, 3.0) - vec2(0.0625, 0.0625)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((interpolate(path, 1.0) - vec2(0.25, 0.125)).lpNorm<Eigen::Infinity>() < 1e-12);

  CHECK(verify_kkt_breakpoints(path, ds, whole_grouping(2, kInf)) < 1e-8);
}

TEST_CASE("single predictor reduces to the lasso") {
  Eigen::VectorXd c0(1);
  c0 << 3;
  const Dataset ds = orthogonal_dataset(c0);
  const RegularizationPath il = ilasso_path(ds);
  const RegularizationPath la = lasso_path(ds);
  REQUIRE(il.breakpoints.size() == la.breakpoints.size());
  for (size_t t = 0; t < il.breakpoints.size(); ++t) {
    CHECK(il.breakpoints[t].lambda == doctest::Approx(la.breakpoints[t].lambda));
    CHECK((il.breakpoints[t].beta - la.breakpoints[t].beta).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("random problems satisfy stationarity and match the oracles") {
  for (std::uint64_t seed : {11, 12, 13, 14}) {
    const int p = seed % 2 ? 2 : 4;
    const Dataset ds = testsupport::standardized_problem(seed * 97 + 5, 15, p);
    const RegularizationPath path = ilasso_path(ds);
    const Grouping g = whole_grouping(p, kInf);

    CHECK(verify_kkt_breakpoints(path, ds, g) < 1e-8);
    const double lam0 = path.breakpoints.front().lambda;
    CHECK(lam0 == doctest::Approx((ds.x.transpose() * ds.y).lpNorm<1>()).epsilon(1e-12));
    for (double f : {0.2, 0.5, 0.85}) {
      const Eigen::VectorXd mine = interpolate(path, f * lam0);
      const Eigen::VectorXd ref =
          p == 2 ? oracle::grid_minimize_2d(ds.x, ds.y, f * lam0, g)
                 : oracle::admm_minimize(ds.x, ds.y, f * lam0, g);
      CHECK((mine - ref).lpNorm<Eigen::Infinity>() < 1e-3);
    }
  }
}

TEST_CASE("kkt verifier flags perturbed solutions") {
  const Dataset ds = testsupport::standardized_problem(21, 16, 3);
  RegularizationPath path = ilasso_path(ds);
  const Grouping g = whole_grouping(3, kInf);
  CHECK(verify_kkt_breakpoints(path, ds, g) < 1e-8);
  REQUIRE(path.breakpoints.size() >= 2);
  path.breakpoints.back().beta[1] -= 0.1;
  CHECK(verify_kkt(path, ds, g, path.breakpoints.back().lambda) > 1e-3);
}

}  // TEST_SUITE
