#include <doctest.h>

#include "cap/path.hpp"
#include "designs.hpp"

using namespace cap;
using testsupport::orthogonal_dataset;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("path_lasso") {

TEST_CASE("orthogonal design follows the soft-threshold closed form") {
  // x'x = 8*I, x'y = (3,1): beta_j(lambda) = soft(c0_j, lambda)/8
  const Dataset ds = orthogonal_dataset(vec2(3, 1));
  const RegularizationPath path = lasso_path(ds);

  REQUIRE(path.breakpoints.size() == 3);
  CHECK(path.breakpoints[0].lambda == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(path.breakpoints[1].lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(path.breakpoints[2].lambda == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(path.breakpoints[0].beta.isZero(0));
  CHECK(path.breakpoints[0].df == 0);
  CHECK(path.breakpoints[1].df == 1);
  CHECK(path.breakpoints[2].df == 2);
  CHECK(path.solver == "lasso");
  CHECK_FALSE(path.approximate);

  for (double lam : {2.5, 2.0, 1.0, 0.5, 0.0}) {
    const Eigen::VectorXd beta = interpolate(path, lam);
    CHECK(beta[0] == doctest::Approx(std::max(3.0 - lam, 0.0) / 8.0).epsilon(1e-12));
    CHECK(beta[1] == doctest::Approx(std::max(1.0 - lam, 0.0) / 8.0).epsilon(1e-12));
  }
  CHECK(interpolate(path, 10.0).isZero(0));  // above lambda_0
  CHECK(path_df(path, 2.0) == 1);
  CHECK(path_df(path, 0.3) == 2);
  CHECK(path_df(path, 99.0) == 0);
}

TEST_CASE("single predictor gives a linear segment") {
  Eigen::VectorXd c0(1);
  c0 << 3;
  const Dataset ds = orthogonal_dataset(c0);
  const RegularizationPath path = lasso_path(ds);
  REQUIRE(path.breakpoints.size() == 2);
  CHECK(path.breakpoints[0].lambda == doctest::Approx(3.0));
  CHECK(interpolate(path, 1.2)[0] == doctest::Approx((3.0 - 1.2) / 8.0).epsilon(1e-12));
}

TEST_CASE("response orthogonal to the design yields the empty path") {
  Dataset ds = orthogonal_dataset(vec2(0, 0));
  ds.y = Eigen::VectorXd::Ones(8);  // centered columns are orthogonal to 1
  const RegularizationPath path = lasso_path(ds);
  REQUIRE(path.breakpoints.size() == 1);
  CHECK(path.breakpoints[0].lambda == 0.0);
  CHECK(path.breakpoints[0].beta.isZero(0));
}

TEST_CASE("random problems agree with the objective oracles") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const int p = seed % 2 ? 2 : 4;
    const Dataset ds = testsupport::standardized_problem(seed * 51 + 7, 14, p);
    const RegularizationPath path = lasso_path(ds);
    const Grouping g = singleton_grouping(p, 1.0);

    CHECK(verify_kkt_breakpoints(path, ds, g) < 1e-8);
    for (size_t t = 1; t < path.breakpoints.size(); ++t)
      CHECK(path.breakpoints[t].lambda < path.breakpoints[t - 1].lambda);

    const double lam0 = path.breakpoints.front().lambda;
    for (double f : {0.15, 0.45, 0.8}) {
      const Eigen::VectorXd mine = interpolate(path, f * lam0);
      const Eigen::VectorXd ref =
          p == 2 ? oracle::grid_minimize_2d(ds.x, ds.y, f * lam0, g)
                 : oracle::admm_minimize(ds.x, ds.y, f * lam0, g);
      CHECK((mine - ref).lpNorm<Eigen::Infinity>() < 1e-3);
    }
  }
}

TEST_CASE("kkt verifier flags perturbed solutions") {
  const Dataset ds = testsupport::standardized_problem(77, 16, 3);
  RegularizationPath path = lasso_path(ds);
  const Grouping g = singleton_grouping(3, 1.0);
  CHECK(verify_kkt_breakpoints(path, ds, g) < 1e-8);
  CHECK(verify_kkt(path, ds, g, path.breakpoints.front().lambda) < 1e-8);

  REQUIRE(path.breakpoints.size() >= 2);
  path.breakpoints[1].beta[0] += 0.1;
  CHECK(verify_kkt(path, ds, g, path.breakpoints[1].lambda) > 1e-3);
}

TEST_CASE("interpolation is affine between breakpoints") {
  const Dataset ds = testsupport::standardized_problem(31, 18, 4);
  const RegularizationPath path = lasso_path(ds);
  const Grouping g = singleton_grouping(4, 1.0);
  for (size_t t = 1; t < path.breakpoints.size(); ++t) {
    const double hi = path.breakpoints[t - 1].lambda;
    const double lo = path.breakpoints[t].lambda;
    for (double f : {0.25, 0.5, 0.75}) {
      const double lam = lo + f * (hi - lo);
      CHECK(verify_kkt(path, ds, g, lam) < 1e-8);
      const Eigen::VectorXd expect = path.breakpoints[t].beta +
          (lam - lo) / (hi - lo) * (path.breakpoints[t - 1].beta - path.breakpoints[t].beta);
      CHECK((interpolate(path, lam) - expect).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

}  // TEST_SUITE
