#include <doctest.h>

#include "cap/clustering.hpp"
#include "cap/simulation.hpp"
#include "designs.hpp"

using namespace cap;

TEST_SUITE("clustering") {

TEST_CASE("correlation distance ignores sign and scale") {
  Eigen::MatrixXd x(4, 3);
  x.col(0) << 1, 2, 3, 4;
  x.col(1) << -2, -4, -6, -8;        // perfectly anti-correlated with col 0
  x.col(2) << 1, -1, -1, 1;          // orthogonal to col 0 after centering
  const Eigen::MatrixXd d = correlation_distance(x);
  CHECK(d.rows() == 3);
  CHECK((d - d.transpose()).lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK(d.diagonal().lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK(d(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d(0, 2) == doctest::Approx(1.0).epsilon(1e-12));

  x.col(1).setConstant(7.0);
  try {
    correlation_distance(x);
    FAIL("expected constant_column");
  } catch (const Error& e) {
    CHECK(e.code() == errc::constant_column);
  }
}

TEST_CASE("pam recovers well-separated clusters") {
  const int p = 5;
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(p, p, 1.0);
  d.diagonal().setZero();
  const auto close = [&](int i, int j) { d(i, j) = d(j, i) = 0.1; };
  close(0, 1);
  close(0, 2);
  close(1, 2);
  close(3, 4);
  const std::vector<int> labels = pam_cluster(d, 2, 0);
  const std::vector<int> truth = {0, 0, 0, 1, 1};
  CHECK(pair_agreement(labels, truth) == doctest::Approx(1.0));

  CHECK(clustering_cost(d, {0, 3}) == doctest::Approx(0.1 + 0.1 + 0.1));
  CHECK(pam_cluster(d, p, 0) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("pam is deterministic in the seed") {
  // four mutually equidistant points force tie-breaks
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, 1.0);
  d.diagonal().setZero();
  CHECK(pam_cluster(d, 2, 17) == pam_cluster(d, 2, 17));
}

TEST_CASE("degenerate requests are rejected") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  try {
    pam_cluster(d, 0, 1);
    FAIL("expected invalid_k");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_k);
  }
  CHECK_THROWS_AS(pam_cluster(d, 4, 1), Error);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
  try {
    pam_cluster(bad, 1, 1);
    FAIL("expected invalid_shape");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_shape);
  }
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
  asym(0, 1) = 0.5;  // missing mirror entry
  CHECK_THROWS_AS(pam_cluster(asym, 1, 1), Error);
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag(1, 1) = 0.2;
  CHECK_THROWS_AS(pam_cluster(diag, 1, 1), Error);
}

TEST_CASE("labels convert to a grouping") {
  const Grouping g = grouping_from_labels({0, 1, 0, 2}, inf_norm, 1.0);
  REQUIRE(g.groups.size() == 3);
  CHECK(g.groups[0] == std::vector<int>{0, 2});
  CHECK(g.groups[1] == std::vector<int>{1});
  CHECK(g.groups[2] == std::vector<int>{3});
  CHECK(g.gamma0 == 1.0);
  for (double gm : g.gamma) CHECK(std::isinf(gm));
  for (double w : g.weights) CHECK(w == 1.0);
  CHECK(groups_partition(g, 4));
}

TEST_CASE("pair agreement is the fraction of concordant pairs") {
  CHECK(pair_agreement({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(pair_agreement({0, 0, 1}, {5, 5, 2}) == doctest::Approx(1.0));  // relabeling
  CHECK(pair_agreement({0, 1, 2}, {0, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("correlated factor design clusters back to its blocks") {
  const GroupedFactorDraw draw = gen_grouped_factor(3, 4, 60, 11);
  const std::vector<int> labels =
      pam_cluster(correlation_distance(draw.x), 3, 11);
  std::vector<int> truth(12);
  for (int j = 0; j < 12; ++j) truth[j] = j / 4;
  CHECK(pair_agreement(labels, truth) >= 0.9);
}

}  // TEST_SUITE
