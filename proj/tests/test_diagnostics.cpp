#include <doctest.h>

#include <cmath>

#include "psun/diagnostics.hpp"
#include "support/oracles.hpp"

using namespace psun;

TEST_CASE("acf") {
  RngStream rng(3);

  SUBCASE("iid noise has vanishing lag-1 correlation") {
    Eigen::VectorXd x(100000);
    for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const Eigen::VectorXd a = acf(x, 5);
    CHECK(a[0] == 1.0);
    CHECK(std::abs(a[1]) < 0.01);
  }
  SUBCASE("AR(1) with phi = 0.9") {
    const Eigen::VectorXd x = oracles::ar1_series(0.9, 200000, rng);
    const Eigen::VectorXd a = acf(x, 2);
    CHECK(a[1] == doctest::Approx(0.9).epsilon(0.022));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(acf(Eigen::VectorXd::Ones(50), 60), std::invalid_argument);
    CHECK_THROWS_AS(acf(Eigen::VectorXd::Ones(50), 5), std::invalid_argument);
  }
}

TEST_CASE("ess") {
  RngStream rng(5);

  SUBCASE("iid is close to N") {
    Eigen::VectorXd x(10000);
    for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const double e = ess(x);
    CHECK(e > 0.9 * 10000);
    CHECK(e <= 1.1 * 10000);
  }
  SUBCASE("AR(1) with phi = 0.9 has ESS about N/19") {
    const long n = 200000;
    const Eigen::VectorXd x = oracles::ar1_series(0.9, n, rng);
    const double e = ess(x);
    const double expected = n * (1.0 - 0.9) / (1.0 + 0.9);
    CHECK(e > 0.8 * expected);
    CHECK(e < 1.2 * expected);
  }
  SUBCASE("never exceeds N") {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::VectorXd x(500);
      for (int i = 0; i < 500; ++i) x[i] = rng.normal();
      // strongly antithetic series would push the naive estimator above N
      for (int i = 1; i < 500; i += 2) x[i] = -0.95 * x[i - 1] + 0.1 * rng.normal();
      CHECK(ess(x) <= 500.0);
    }
    CHECK_THROWS_AS(ess(Eigen::VectorXd::Ones(200)), std::invalid_argument);
    CHECK_THROWS_AS(ess(Eigen::VectorXd::Zero(50)), std::invalid_argument);
  }
}

TEST_CASE("type-7 quantiles interpolate order statistics") {
  const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 4.0);
  CHECK(quantile_type7(v, 0.5) == doctest::Approx(2.5));
  // h = (n-1) p: p = 1/3 -> exactly the second order statistic
  CHECK(quantile_type7(v, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK(quantile_type7(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_type7({7.0}, 0.9) == 7.0);
  CHECK_THROWS_AS(quantile_type7({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_type7({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("summaries are deterministic and ordered") {
  RngStream rng(7);
  DrawMatrix dm;
  dm.draws.resize(5000, 2);
  for (int i = 0; i < 5000; ++i) {
    dm.draws(i, 0) = rng.normal();
    dm.draws(i, 1) = 2.0 + 0.5 * rng.normal();
  }
  dm.chain.assign(5000, 0);
  dm.names = {"a", "b"};
  const ChainSummary s1 = summarize(dm);
  const ChainSummary s2 = summarize(dm);
  REQUIRE(s1.coefficients.size() == 2);
  CHECK(s1.coefficients[0].name == "a");
  CHECK(s1.coefficients[1].mean == s2.coefficients[1].mean);
  CHECK(s1.coefficients[1].mean == doctest::Approx(2.0).epsilon(0.05));
  for (std::size_t l = 1; l < s1.levels.size(); ++l)
    CHECK(s1.coefficients[0].quantiles[l] >= s1.coefficients[0].quantiles[l - 1]);
  CHECK(s1.coefficients[0].ess > 0.0);
  CHECK(s1.coefficients[0].ess <= 5000.0);
  CHECK(s1.coefficients[0].mcse ==
        doctest::Approx(s1.coefficients[0].sd / std::sqrt(s1.coefficients[0].ess)));
}
