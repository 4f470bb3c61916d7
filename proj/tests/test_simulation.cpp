#include <doctest.h>

#include <cmath>

#include "cap/simulation.hpp"
#include "designs.hpp"

using namespace cap;

namespace {

// Analytic predictor covariance of the grouped-factor design, written out
// independently of the generator.
Eigen::MatrixXd factor_sigma(int k_groups, int q) {
  const int p = k_groups * q;
  Eigen::MatrixXd s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const int dk = std::abs(i / q - j / q);
      const double z = dk == 0 ? 2.0 : (dk == 1 ? 1.0 : 0.0);
      s(i, j) = z + 4.0 * std::pow(0.95, std::abs(i - j));
    }
  return s;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("grouped-factor covariance matches the analytic form") {
  const GroupedFactorDraw draw = gen_grouped_factor(3, 4, 40, 1);
  CHECK(draw.x.rows() == 40);
  CHECK(draw.x.cols() == 12);
  CHECK((draw.sigma - factor_sigma(3, 4)).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(draw.sigma(0, 0) == doctest::Approx(6.0));
  CHECK(draw.sigma(0, 1) == doctest::Approx(5.8));
  CHECK(draw.sigma(3, 4) == doctest::Approx(4.8));
  CHECK(groups_partition(draw.true_groups, 12));
  REQUIRE(draw.true_groups.groups.size() == 3);
  CHECK(draw.true_groups.groups[1] == std::vector<int>{4, 5, 6, 7});

  // one q = 10 block, the quantity the signal calibration rests on
  const GroupedFactorDraw one = gen_grouped_factor(1, 10, 5, 1);
  CHECK(one.sigma.sum() == doctest::Approx(540.1602952846719).epsilon(1e-12));
}

TEST_CASE("sampled rows reproduce the analytic covariance") {
  const int n = 6000;
  const GroupedFactorDraw draw = gen_grouped_factor(3, 4, n, 7);
  const Eigen::MatrixXd centered = draw.x.rowwise() - draw.x.colwise().mean();
  const Eigen::MatrixXd s = centered.transpose() * centered / double(n - 1);
  CHECK((s - draw.sigma).lpNorm<Eigen::Infinity>() < 0.6);
}

TEST_CASE("fixed coefficient profile") {
  const Eigen::VectorXd beta = gen_beta_411(100);
  CHECK(beta[0] == doctest::Approx(0.20));
  CHECK(beta[9] == doctest::Approx(0.1 * (1 + std::pow(0.9, 9))));
  CHECK(beta[10] == doctest::Approx(0.08));
  CHECK(beta[25] == doctest::Approx(0.01 * (1 + std::pow(0.9, 5))));
  for (int j = 30; j < 100; ++j) CHECK(beta[j] == 0.0);
}

TEST_CASE("laplace coefficients have the requested spread") {
  // grouped scheme: one value shared within each block
  const Eigen::VectorXd b = gen_laplace_beta(LaplaceScheme::grouped, 3, 4, 0.5, 2);
  REQUIRE(b.size() == 12);
  for (int k = 0; k < 3; ++k)
    for (int j = 1; j < 4; ++j) CHECK(b[4 * k + j] == b[4 * k]);

  double sum_abs = 0.0, sum_sq = 0.0;
  const int draws = 800, p = 50;
  for (int s = 0; s < draws; ++s) {
    const Eigen::VectorXd v =
        gen_laplace_beta(LaplaceScheme::individual, 1, p, 0.5, 1000 + s);
    sum_abs += v.lpNorm<1>();
    sum_sq += v.squaredNorm();
  }
  const double m = double(draws * p);
  CHECK(sum_abs / m == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.03));
  CHECK(sum_sq / m == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("signal power calibration") {
  // independent quadratic-form oracle
  for (int kg : {2, 10}) {
    for (int q : {3, 10}) {
      const Eigen::MatrixXd s = factor_sigma(kg, q);
      const double alpha = 0.17;
      double grouped = 0.0;
      for (int k = 0; k < kg; ++k)
        grouped += s.block(k * q, k * q, q, q).sum();
      CHECK(laplace_signal_power(LaplaceScheme::grouped, kg, q, alpha) ==
            doctest::Approx(alpha * alpha * grouped).epsilon(1e-12));
      CHECK(laplace_signal_power(LaplaceScheme::individual, kg, q, alpha) ==
            doctest::Approx(alpha * alpha * s.trace()).epsilon(1e-12));
    }
  }

  // pinned calibration values
  CHECK(laplace_signal_power(LaplaceScheme::grouped, 10, 10, 0.1) ==
        doctest::Approx(54.01602952846719).epsilon(1e-12));
  CHECK(laplace_signal_power(LaplaceScheme::individual, 10, 10, 0.3) ==
        doctest::Approx(54.0).epsilon(1e-12));
  CHECK(laplace_signal_power(LaplaceScheme::individual, 25, 10, 0.19) ==
        doctest::Approx(54.15).epsilon(1e-12));
  CHECK(laplace_signal_power(LaplaceScheme::grouped, 25, 10, 0.063) ==
        doctest::Approx(0.063 * 0.063 * 25 * 540.1602952846719).epsilon(1e-12));
  CHECK(laplace_signal_power(LaplaceScheme::grouped, 10, 25, 0.043) ==
        doctest::Approx(54.64).epsilon(2e-3));
}

TEST_CASE("two-way anova family") {
  const AnovaDraw draw = gen_anova(10, AnovaLevel::moderate, 121, 3.7, 3);
  CHECK(draw.x.rows() == 121);
  CHECK(draw.x.cols() == 55);
  CHECK(draw.graph.node_count() == 55);
  CHECK_FALSE(is_tree(draw.graph));

  CHECK(draw.beta[0] == doctest::Approx(7.0));
  CHECK(draw.beta[1] == doctest::Approx(2.0));
  CHECK(draw.beta[2] == doctest::Approx(1.0));
  CHECK(draw.beta[3] == doctest::Approx(1.0));
  CHECK(draw.beta[4] == 0.0);

  // interaction columns in lexicographic pair order after the 10 mains
  const auto col = [&](int a, int b) {
    int c = 10;
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j) {
        if (i == a && j == b) return c;
        ++c;
      }
    return -1;
  };
  CHECK(draw.beta[col(0, 1)] == doctest::Approx(1.0));
  CHECK(draw.beta[col(1, 2)] == doctest::Approx(0.5));
  CHECK(draw.beta[col(1, 3)] == doctest::Approx(0.4));
  CHECK(draw.beta[col(2, 3)] == doctest::Approx(0.1));

  // interaction columns are products of the mains
  CHECK((draw.x.col(col(0, 1)).array() - draw.x.col(0).array() * draw.x.col(1).array())
            .abs()
            .maxCoeff() < 1e-12);

  CHECK(gen_anova(10, AnovaLevel::none, 30, 3.7, 1).snr == doctest::Approx(4.0175).epsilon(5e-4));
  CHECK(gen_anova(10, AnovaLevel::weak, 30, 3.7, 1).snr == doctest::Approx(4.0768).epsilon(5e-4));
  CHECK(gen_anova(10, AnovaLevel::moderate, 30, 3.7, 1).snr ==
        doctest::Approx(4.3287).epsilon(5e-4));
  CHECK(gen_anova(10, AnovaLevel::strong, 30, 3.7, 1).snr ==
        doctest::Approx(13.879).epsilon(5e-4));
  CHECK(gen_anova(10, AnovaLevel::very_strong, 30, 3.7, 1).snr ==
        doctest::Approx(38.203).epsilon(5e-4));
}

TEST_CASE("wavelet family derives noise from the design second moment") {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(15);
  beta[0] = 2.0;
  const WaveletDraw draw = gen_wavelet(beta, 0.4, 5);
  CHECK(draw.x.rows() == 80);
  CHECK(draw.x.cols() == 15);
  CHECK(draw.sigma(0, 0) == doctest::Approx(1.0));
  CHECK(draw.sigma_noise == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  CHECK(is_tree(draw.tree));

  const WaveletDraw doubled = gen_wavelet(2 * beta, 0.4, 5);
  CHECK(doubled.sigma_noise == doctest::Approx(2.0 * std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("model error is the sigma-weighted squared distance") {
  Eigen::VectorXd bh(2), bt(2);
  bh << 1.0, 2.0;
  bt << 0.0, 1.0;
  CHECK(model_error(bh, bt, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(2.0));
  Eigen::MatrixXd s(2, 2);
  s << 2, 1, 1, 3;
  // v = (1,1): v' s v = 2 + 1 + 1 + 3
  CHECK(model_error(bh, bt, s) == doctest::Approx(7.0));
}

TEST_CASE("summaries") {
  const MetricSummary s = summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.se == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(summarize({5.0}).se == 0.0);
  CHECK(summarize({}).mean == 0.0);
}

TEST_CASE("experiment harness is deterministic and fills every cell") {
  ExperimentSpec spec;
  spec.family = "grouped";
  spec.n = 24;
  spec.k_groups = 2;
  spec.group_size = 2;
  spec.sigma = 1.0;
  spec.beta_scheme = "fixed411";
  spec.replications = 2;
  spec.seed = 9;
  ArmSpec lasso_arm;
  lasso_arm.solver = "lasso";
  lasso_arm.grouping = "none";
  lasso_arm.selection = "aicc";
  ArmSpec icap_arm;
  icap_arm.solver = "icap";
  icap_arm.grouping = "true";
  icap_arm.selection = "aicc";
  spec.arms = {lasso_arm, icap_arm};

  const ExperimentReport rep = run_experiment(spec);
  REQUIRE(rep.arms.size() == 2);
  CHECK(rep.arms[0].arm.name == "lasso-none-aicc");
  CHECK(rep.arms[1].arm.name == "icap-true-aicc");
  for (const ArmReport& arm : rep.arms) {
    REQUIRE(arm.reps.size() == 2);
    for (const RepRecord& r : arm.reps) {
      CHECK(std::isfinite(r.model_error));
      CHECK(r.model_error >= 0.0);
      CHECK(r.lambda >= 0.0);
      CHECK(r.n_selected >= 0);
      CHECK(r.n_selected <= 4);
    }
  }

  const ExperimentReport again = run_experiment(spec);
  for (size_t a = 0; a < rep.arms.size(); ++a)
    for (size_t r = 0; r < rep.arms[a].reps.size(); ++r) {
      CHECK(again.arms[a].reps[r].model_error == rep.arms[a].reps[r].model_error);
      CHECK(again.arms[a].reps[r].lambda == rep.arms[a].reps[r].lambda);
    }
}

}  // TEST_SUITE
