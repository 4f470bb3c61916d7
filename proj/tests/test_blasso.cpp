#include <doctest.h>

#include "cap/blasso.hpp"
#include "designs.hpp"

using namespace cap;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double max_dev_vs_exact(const RegularizationPath& approx, const RegularizationPath& exact) {
  const double lam0 = exact.breakpoints.front().lambda;
  double worst = 0.0;
  for (double f : {0.5, 0.25, 0.1, 0.02}) {
    const Eigen::VectorXd a = interpolate(approx, f * lam0);
    const Eigen::VectorXd b = interpolate(exact, f * lam0);
    worst = std::max(worst, (a - b).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace

TEST_SUITE("blasso") {

TEST_CASE("stepwise path structure") {
  const Dataset ds = testsupport::standardized_problem(101, 16, 4);
  BlassoConfig cfg;
  cfg.eps = 0.01;
  const RegularizationPath path = blasso_path(ds, singleton_grouping(4, 1.0), cfg);

  CHECK(path.solver == "blasso");
  CHECK(path.approximate);
  CHECK(path.eps == doctest::Approx(0.01));
  CHECK(path.breakpoints.front().lambda > 0.0);
  for (size_t t = 1; t < path.breakpoints.size(); ++t)
    CHECK(path.breakpoints[t].lambda < path.breakpoints[t - 1].lambda);

  // every coefficient is an integer multiple of the step size
  for (const Breakpoint& bp : path.breakpoints)
    for (int j = 0; j < 4; ++j) {
      const double k = bp.beta[j] / cfg.eps;
      CHECK(std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, std::abs(k)));
    }
}

TEST_CASE("halving the step size tightens the lasso approximation") {
  const Dataset ds = testsupport::standardized_problem(102, 18, 4);
  const Grouping g = singleton_grouping(4, 1.0);
  const RegularizationPath exact = lasso_path(ds);

  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.04, 0.02, 0.01}) {
    BlassoConfig cfg;
    cfg.eps = eps;
    cfg.lambda_floor = 1e-3 * exact.breakpoints.front().lambda;
    const double dev = max_dev_vs_exact(blasso_path(ds, g, cfg), exact);
    CHECK(dev <= 5 * eps);
    CHECK(dev <= prev + 1e-12);
    prev = dev;
  }
}

TEST_CASE("grouped l2 penalty tracks the convex oracle") {
  const Dataset ds = testsupport::standardized_problem(103, 18, 6);
  Grouping g;
  g.groups = {{0, 1}, {2, 3}, {4, 5}};
  g.gamma = {2.0, 2.0, 2.0};
  g.weights = {1.0, 1.0, 1.0};
  g.gamma0 = 1.0;

  BlassoConfig cfg;
  cfg.eps = 0.01;
  const RegularizationPath path = blasso_path(ds, g, cfg);
  const double lam0 = path.breakpoints.front().lambda;
  for (double f : {0.4, 0.15, 0.05}) {
    const Eigen::VectorXd ref = oracle::admm_minimize(ds.x, ds.y, f * lam0, g);
    CHECK((interpolate(path, f * lam0) - ref).lpNorm<Eigen::Infinity>() < 5 * cfg.eps);
  }
}

TEST_CASE("overlapping groups are accepted and the objective tracks the oracle") {
  const Dataset ds = testsupport::standardized_problem(104, 16, 3);
  Grouping g;
  g.groups = {{0, 1}, {1, 2}};
  g.gamma = {2.0, 2.0};
  g.weights = {1.0, 1.0};
  g.gamma0 = 1.0;

  BlassoConfig cfg;
  cfg.eps = 0.005;
  const RegularizationPath path = blasso_path(ds, g, cfg);
  const double lam0 = path.breakpoints.front().lambda;
  for (double f : {0.3, 0.1}) {
    const double lam = f * lam0;
    const Eigen::VectorXd ref = oracle::admm_minimize(ds.x, ds.y, lam, g);
    const double mine = oracle::objective(ds.x, ds.y, interpolate(path, lam), lam, g);
    const double best = oracle::objective(ds.x, ds.y, ref, lam, g);
    CHECK(mine <= best + 0.05 * std::max(1.0, best));
  }
}

TEST_CASE("tiny step budget raises step_budget_exceeded") {
  const Dataset ds = testsupport::standardized_problem(105, 16, 4);
  BlassoConfig cfg;
  cfg.eps = 1e-4;
  cfg.max_steps = 10;
  try {
    blasso_path(ds, singleton_grouping(4, 1.0), cfg);
    FAIL("expected step_budget_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == errc::step_budget_exceeded);
  }
}

TEST_CASE("the path stops at the lambda floor") {
  const Dataset ds = testsupport::standardized_problem(106, 16, 3);
  BlassoConfig cfg;
  cfg.eps = 0.02;
  const Grouping g = whole_grouping(3, kInf);
  const RegularizationPath free_path = blasso_path(ds, g, cfg);
  cfg.lambda_floor = 0.5 * free_path.breakpoints.front().lambda;
  const RegularizationPath floored = blasso_path(ds, g, cfg);
  CHECK(floored.breakpoints.back().lambda <= cfg.lambda_floor + 1e-12);
  CHECK(floored.breakpoints.size() < free_path.breakpoints.size());
}

}  // TEST_SUITE
