#include <doctest.h>

#include <cmath>

#include "psun/simstudy.hpp"
#include "support/oracles.hpp"

using namespace psun;

TEST_CASE("wishart draws") {
  RngStream rng(3);

  SUBCASE("mean matches the target entrywise") {
    Eigen::MatrixXd target(3, 3);
    target << 4.0, 0.8, 0.2, 0.8, 2.0, -0.3, 0.2, -0.3, 1.5;
    const int n = 10000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd acc2 = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXd w = wishart_sample(target, rng);
      acc += w;
      acc2 += w.cwiseProduct(w);
    }
    const Eigen::MatrixXd mean = acc / n;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double var = acc2(i, j) / n - mean(i, j) * mean(i, j);
        const double se = std::sqrt(var / n);
        CHECK(std::abs(mean(i, j) - target(i, j)) < 4.0 * se);
      }
  }
  SUBCASE("one-dimensional case is a Gamma with the right mean") {
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(1, 1, 3.0);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = wishart_sample(target, rng)(0, 0);
    const auto st = oracles::scalar_moments(xs);
    CHECK(std::abs(st.mean[0] - 3.0) < 4.0 * st.se[0]);
  }
  SUBCASE("every draw is SPD") {
    Eigen::MatrixXd target(2, 2);
    target << 1.0, 0.4, 0.4, 2.0;
    for (int i = 0; i < 200; ++i) {
      const Eigen::MatrixXd w = wishart_sample(target, rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("study configuration") {
  const auto levels = StudyConfig::default_levels();
  REQUIRE(levels.size() == 19);
  CHECK(levels.front() == doctest::Approx(0.05));
  CHECK(levels.back() == doctest::Approx(0.95));
  CHECK(default_combos().size() == 5);

  StudyConfig bad;
  bad.g_reps = 4;
  bad.levels = {0.5, 0.4};
  CHECK_THROWS_AS(run_study(bad), std::invalid_argument);
}

TEST_CASE("small study runs deterministically with calibrated-ish coverage") {
  StudyConfig cfg;
  cfg.g_reps = 40;
  cfg.n = 20;
  cfg.p = 4;
  cfg.combos = {make_combo(Link::kProbit, PriorFamily::kGaussian)};
  cfg.gibbs_iters = 1500;
  cfg.burnin = 300;
  cfg.seed = 7;
  cfg.max_threads = 2;

  const CoverageTable t1 = run_study(cfg);
  const CoverageTable t2 = run_study(cfg);
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.levels.size() == 19);
  CHECK(t1.failures == 0);
  for (std::size_t r = 0; r < t1.rows.size(); ++r) {
    CHECK(t1.rows[r].coverage == t2.rows[r].coverage);
    CHECK(t1.rows[r].coverage.size() == 19);
    // monotone in the level, exactly
    for (std::size_t l = 1; l < 19; ++l)
      CHECK(t1.rows[r].coverage[l] >= t1.rows[r].coverage[l - 1]);
  }
  // Bayes calibration at G = 40: binomial noise ~ 0.08; use loose gates.
  const auto& cov = t1.rows[0].coverage;  // intercept row
  CHECK(std::abs(cov[9] - 0.50) < 0.25);  // level 0.50
  CHECK(cov[18] > 0.75);                  // level 0.95
}
