#include <doctest.h>

#include "cap/dataset.hpp"
#include "designs.hpp"

using namespace cap;

TEST_SUITE("dataset") {

TEST_CASE("standardize centers and rescales to population variance one") {
  Dataset raw;
  raw.x.resize(3, 1);
  raw.x << 1, 2, 3;
  raw.y.resize(3);
  raw.y << 0, 0, 0;
  const Dataset ds = standardize(raw);
  // column (1,2,3): mean 2, variance 2/3, so x_std = (-1,0,1)*sqrt(3/2)
  const double s = std::sqrt(1.5);
  CHECK(ds.x(0, 0) == doctest::Approx(-s).epsilon(1e-12));
  CHECK(ds.x(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ds.x(2, 0) == doctest::Approx(s).epsilon(1e-12));
  CHECK(ds.col_mean[0] == doctest::Approx(2.0));
  CHECK(ds.col_scale[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(ds.standardized);
  CHECK(x_standardized(ds));
}

TEST_CASE("standardized moments are exact on random data") {
  const Dataset ds = testsupport::standardized_problem(11, 40, 6);
  for (int j = 0; j < 6; ++j) {
    CHECK(std::abs(ds.x.col(j).mean()) < 1e-12);
    CHECK(ds.x.col(j).squaredNorm() / 40.0 == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(ds.y.mean()) < 1e-12);
}

TEST_CASE("standardize is idempotent and composes the recorded transform") {
  oracle::Problem pr = oracle::random_problem(7, 25, 4);
  Dataset raw;
  raw.x = pr.x.array() * 3.0 + 5.0;  // shift/scale so the transform is nontrivial
  raw.y = pr.y;
  const Dataset once = standardize(raw);
  const Dataset twice = standardize(once);
  CHECK((twice.x - once.x).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((twice.col_mean - once.col_mean).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((twice.col_scale - once.col_scale).lpNorm<Eigen::Infinity>() < 1e-10);
  // recorded transform maps the raw columns onto the standardized ones
  for (int j = 0; j < 4; ++j) {
    const Eigen::VectorXd mapped =
        (raw.x.col(j).array() - once.col_mean[j]) / once.col_scale[j];
    CHECK((mapped - once.x.col(j)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("constant column is rejected") {
  Dataset raw;
  raw.x = Eigen::MatrixXd::Ones(5, 2);
  raw.x.col(0) = Eigen::VectorXd::LinSpaced(5, 0, 4);
  raw.y = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_WITH_AS(standardize(raw), doctest::Contains("constant_column"), Error);
  try {
    standardize(raw);
  } catch (const Error& e) {
    CHECK(e.code() == errc::constant_column);
  }
}

TEST_CASE("shape errors") {
  Dataset raw;
  raw.x = Eigen::MatrixXd::Random(4, 2);
  raw.y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(standardize(raw), Error);
  raw.x = Eigen::MatrixXd::Random(1, 2);
  raw.y = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(standardize(raw), Error);
}

TEST_CASE("raw-unit coefficients reproduce standardized predictions") {
  oracle::Problem pr = oracle::random_problem(3, 30, 5);
  Dataset raw;
  raw.x = pr.x.array() * 2.0 - 1.5;
  raw.y = pr.y.array() + 4.0;
  const Dataset ds = standardize(raw);
  Eigen::VectorXd beta_std(5);
  beta_std << 0.7, -0.2, 0.0, 1.1, 0.4;
  const Eigen::VectorXd beta_raw = to_raw_coefficients(ds, beta_std);
  const double b0 = raw_intercept(ds, beta_std);
  const Eigen::VectorXd pred_std = ds.x * beta_std;
  const Eigen::VectorXd pred_raw =
      (raw.x * beta_raw).array() + b0 - ds.y_mean;  // both sides centered
  CHECK((pred_raw - pred_std).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("fingerprint identifies the exact bytes") {
  Dataset a = testsupport::standardized_problem(5, 12, 3);
  Dataset b = a;
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
  b.y[4] += 1e-12;
  CHECK(dataset_fingerprint(a) != dataset_fingerprint(b));
}

}  // TEST_SUITE
