#include <doctest.h>

#include <random>

#include "cap/penalty.hpp"
#include "designs.hpp"

using namespace cap;

namespace {

// Random grouping with overlap allowed; every index covered.
Grouping random_grouping(std::mt19937_64& rng, int p, bool overlap) {
  const double gammas[] = {1.0, 1.1, 2.0, 4.0, inf_norm};
  Grouping g;
  if (overlap) {
    const int k = 2 + int(rng() % 3);
    g.groups.assign(k, {});
    for (int j = 0; j < p; ++j) g.groups[rng() % k].push_back(j);  // cover everything
    for (int m = 0; m < k; ++m)
      for (int j = 0; j < p; ++j)
        if (rng() % 3 == 0) g.groups[m].push_back(j);
    for (auto& grp : g.groups) {
      std::sort(grp.begin(), grp.end());
      grp.erase(std::unique(grp.begin(), grp.end()), grp.end());
    }
    g.groups.erase(std::remove_if(g.groups.begin(), g.groups.end(),
                                  [](const auto& v) { return v.empty(); }),
                   g.groups.end());
  } else {
    g.groups = oracle::random_partition(rng(), p, 4);
  }
  const double g0s[] = {1.0, 2.0, inf_norm};
  g.gamma0 = g0s[rng() % 3];
  for (size_t m = 0; m < g.groups.size(); ++m) {
    g.gamma.push_back(gammas[rng() % 5]);
    g.weights.push_back(0.5 + double(rng() % 100) / 50.0);
  }
  return g;
}

Eigen::VectorXd random_beta(std::mt19937_64& rng, int p) {
  std::normal_distribution<double> gauss(0.0, 2.0);
  Eigen::VectorXd b(p);
  for (int j = 0; j < p; ++j) b[j] = rng() % 4 == 0 ? 0.0 : gauss(rng);
  return b;
}

}  // namespace

TEST_SUITE("penalty") {

TEST_CASE("vector_norm covers the whole gamma range") {
  Eigen::VectorXd v(3);
  v << 3, -4, 0;
  CHECK(vector_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(vector_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(vector_norm(v, 4.0) == doctest::Approx(std::pow(81 + 256, 0.25)));
  CHECK(vector_norm(v, inf_norm) == doctest::Approx(4.0));
  CHECK(vector_norm(Eigen::VectorXd::Zero(2), 1.3) == 0.0);
}

TEST_CASE("worked penalty values") {
  Grouping g;
  g.groups = {{0, 1}, {2}};
  g.gamma = {inf_norm, inf_norm};
  g.weights = {1.0, 1.0};
  Eigen::VectorXd beta(3);
  beta << 3, -1, 2;
  const PenaltyValue v = evaluate_penalty(beta, g);
  CHECK(v.group_norms[0] == doctest::Approx(3.0));
  CHECK(v.group_norms[1] == doctest::Approx(2.0));
  CHECK(v.total == doctest::Approx(5.0));
  CHECK(evaluate_penalty(Eigen::VectorXd::Zero(3), g).total == 0.0);

  // singleton groups of any norm reduce to the l1 norm
  Eigen::VectorXd b2(3);
  b2 << 1, -2, 3;
  CHECK(evaluate_penalty(b2, singleton_grouping(3, 4.0)).total == doctest::Approx(6.0));
}

TEST_CASE("penalty matches the definitional oracle on random draws") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 300; ++it) {
    const int p = 2 + int(rng() % 7);
    const Grouping g = random_grouping(rng, p, it % 2 == 0);
    const Eigen::VectorXd beta = random_beta(rng, p);
    CHECK(evaluate_penalty(beta, g).total ==
          doctest::Approx(oracle::penalty(beta, g)).epsilon(1e-12));
  }
}

TEST_CASE("penalized objective is half RSS plus lambda times penalty") {
  const Dataset ds = testsupport::standardized_problem(9, 15, 4);
  std::mt19937_64 rng(5);
  const Grouping g = random_grouping(rng, 4, true);
  const Eigen::VectorXd beta = random_beta(rng, 4);
  CHECK(penalized_objective(ds, beta, g, 0.0) ==
        doctest::Approx(0.5 * (ds.y - ds.x * beta).squaredNorm()).epsilon(1e-12));
  CHECK(penalized_objective(ds, Eigen::VectorXd::Zero(4), g, 3.0) ==
        doctest::Approx(0.5 * ds.y.squaredNorm()).epsilon(1e-12));
  CHECK(penalized_objective(ds, beta, g, 1.7) ==
        doctest::Approx(oracle::objective(ds.x, ds.y, beta, 1.7, g)).epsilon(1e-12));
}

TEST_CASE("homogeneity and triangle inequality") {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 300; ++it) {
    const int p = 2 + int(rng() % 6);
    const Grouping g = random_grouping(rng, p, it % 2 == 0);
    const Eigen::VectorXd a = random_beta(rng, p);
    const Eigen::VectorXd b = random_beta(rng, p);
    const double t = -2.0 + double(rng() % 400) / 100.0;
    const double ta = evaluate_penalty(a, g).total;
    CHECK(evaluate_penalty(t * a, g).total ==
          doctest::Approx(std::abs(t) * ta).epsilon(1e-9));
    CHECK(evaluate_penalty(a + b, g).total <=
          ta + evaluate_penalty(b, g).total + 1e-9);
  }
}

TEST_CASE("subgradient membership for separable penalties") {
  const Grouping lasso = singleton_grouping(2, 1.0);
  Eigen::VectorXd beta(2), cand(2);

  beta << 1.5, 0.0;
  cand << 1.0, 0.3;  // sign on the active coordinate, interior elsewhere
  CHECK(subgradient_violation(beta, lasso, cand) < 1e-12);
  CHECK(subgradient_set_contains(beta, lasso, cand));

  cand << 1.0, 1.5;  // outside [-1,1] on a zero coordinate
  CHECK(subgradient_violation(beta, lasso, cand) > 0.4);
  CHECK_FALSE(subgradient_set_contains(beta, lasso, cand));

  cand << 0.9, 0.0;  // active coordinate must sit exactly at its sign
  CHECK(subgradient_violation(beta, lasso, cand) > 0.05);
}

TEST_CASE("subgradient membership for a max-norm group") {
  Grouping g = whole_grouping(2, inf_norm);
  Eigen::VectorXd beta(2), cand(2);
  beta << 2, 2;  // both coordinates attain the max
  cand << 0.3, 0.7;
  CHECK(subgradient_violation(beta, g, cand) < 1e-9);
  cand << 0.6, 0.6;  // mass 1.2 over the attaining set, violates the dual bound
  CHECK(subgradient_violation(beta, g, cand) > 1e-3);
  beta << 2, 1;  // only the first coordinate attains the max
  cand << 1.0, 0.0;
  CHECK(subgradient_violation(beta, g, cand) < 1e-9);
  cand << 0.5, 0.5;
  CHECK(subgradient_violation(beta, g, cand) > 1e-3);
}

TEST_CASE("subgradient membership for overlapping max-norm groups at zero") {
  // T = max(|b0|,|b1|) + |b1|: the subdifferential at 0 is the sum of the two
  // dual balls, so coordinate 1 can carry up to 2 while 0 is capped at 1.
  Grouping g;
  g.groups = {{0, 1}, {1}};
  g.gamma = {inf_norm, inf_norm};
  g.weights = {1.0, 1.0};
  g.gamma0 = 1.0;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd cand(2);
  cand << 1.0, 1.0;
  CHECK(subgradient_violation(zero, g, cand) < 1e-7);
  cand << 0.5, 1.5;
  CHECK(subgradient_violation(zero, g, cand) < 1e-7);
  cand << 1.5, 0.2;
  CHECK(subgradient_violation(zero, g, cand) > 0.2);
  cand << 0.9, 1.8;
  CHECK(subgradient_violation(zero, g, cand) > 0.2);
}

}  // TEST_SUITE
