#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "psun/special.hpp"
#include "psun/tmvn.hpp"
#include "support/oracles.hpp"

using namespace psun;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd random_psd(int k, RngStream& rng) {
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd s = a * a.transpose();
  s.diagonal().array() += 0.3;
  return s;
}
}  // namespace

TEST_CASE("one-dimensional half normal") {
  RngStream rng(5);
  TruncationSpec spec{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_tmvn_upper(spec, rng)[0];
  const auto st = oracles::scalar_moments(xs);
  CHECK(std::abs(st.mean[0] + 0.7978845608028654) < 0.01);
  for (double x : xs) CHECK(x <= 0.0);
}

TEST_CASE("independent components stay independent") {
  RngStream rng(7);
  TruncationSpec spec{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  const int n = 100000;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = sample_tmvn_upper(spec, rng);
    sx += x[0];
    sy += x[1];
    sxy += x[0] * x[1];
    sxx += x[0] * x[0];
    syy += x[1] * x[1];
  }
  const double mx = sx / n, my = sy / n;
  const double corr = (sxy / n - mx * my) /
                      std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("correlated case matches the naive rejection oracle") {
  RngStream rng(11);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd upper(2);
  upper << 0.5, -0.5;
  TruncationSpec spec{upper, sigma};

  const long n = 60000;
  std::vector<Eigen::VectorXd> ours(n);
  for (auto& x : ours) x = sample_tmvn_upper(spec, rng);
  const auto mine = oracles::moments(ours);
  const auto oracle = oracles::moments(oracles::naive_tmvn_upper(upper, sigma, n, rng));
  for (int j = 0; j < 2; ++j) {
    const double se = std::hypot(mine.se[j], oracle.se[j]);
    CHECK(std::abs(mine.mean[j] - oracle.mean[j]) < 4.0 * se);
  }
}

TEST_CASE("moment agreement on random covariances up to dimension four") {
  RngStream rng(13);
  int done = 0;
  int attempt = 0;
  while (done < 10 && attempt < 60) {
    ++attempt;
    const int k = 2 + (attempt % 3);
    Eigen::MatrixXd sigma = random_psd(k, rng);
    Eigen::VectorXd upper(k);
    for (int i = 0; i < k; ++i)
      upper[i] = std::sqrt(sigma(i, i)) * (0.4 + 1.2 * rng.uniform());
    TruncationSpec spec{upper, sigma};
    std::vector<Eigen::VectorXd> oracle_draws;
    try {
      oracle_draws = oracles::naive_tmvn_upper(upper, sigma, 30000, rng, 4000000);
    } catch (const std::runtime_error&) {
      continue;  // region too small for the naive oracle; skip this config
    }
    const long n = 30000;
    std::vector<Eigen::VectorXd> ours(n);
    for (auto& x : ours) x = sample_tmvn_upper(spec, rng);
    const auto mine = oracles::moments(ours);
    const auto orc = oracles::moments(oracle_draws);
    for (int j = 0; j < k; ++j) {
      const double se = std::hypot(mine.se[j], orc.se[j]);
      INFO("attempt=", attempt, " k=", k, " j=", j);
      CHECK(std::abs(mine.mean[j] - orc.mean[j]) < 4.0 * se);
    }
    ++done;
  }
  CHECK(done == 10);
}

TEST_CASE("every draw satisfies the constraints, importance weights respect the bound") {
  RngStream rng(17);
  const int k = 5;
  Eigen::MatrixXd sigma = random_psd(k, rng);
  Eigen::VectorXd upper(k);
  for (int i = 0; i < k; ++i) upper[i] = -0.5 + 2.0 * rng.uniform();
  upper[2] = kInf;  // one unconstrained component
  TruncationSpec spec{upper, sigma};
  TiltedSequentialSampler sampler(spec);
  CHECK(sampler.converged());
  for (int i = 0; i < 5000; ++i) {
    const Eigen::VectorXd x = sampler.sample(rng);
    for (int j = 0; j < k; ++j) CHECK(x[j] <= upper[j]);
  }
  // The minimax bound must dominate the realized log weights.
  const RegionLogProb lp = sampler.estimate_log_prob(20000, rng);
  CHECK(lp.log_prob <= sampler.psi_star() + 1e-9);
}

TEST_CASE("region probability estimates") {
  RngStream rng(19);

  SUBCASE("half line") {
    TruncationSpec spec{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    const auto r = mc_region_log_prob(spec, 20000, rng);
    CHECK(r.log_prob == doctest::Approx(std::log(0.5)).epsilon(0.01));
  }
  SUBCASE("independent octant") {
    TruncationSpec spec{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
    const auto r = mc_region_log_prob(spec, 20000, rng);
    CHECK(std::abs(r.log_prob - std::log(0.125)) < 0.02);
  }
  SUBCASE("bivariate orthant with rho = 1/2 is exactly 1/3") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 1.0;
    TruncationSpec spec{Eigen::VectorXd::Zero(2), sigma};
    const auto r = mc_region_log_prob(spec, 40000, rng);
    CHECK(std::abs(r.log_prob - std::log(1.0 / 3.0)) < 0.02);
    CHECK(std::abs(r.log_prob - std::log(1.0 / 3.0)) < 4.0 * r.rel_std_err);
  }
  SUBCASE("all bounds infinite") {
    TruncationSpec spec{Eigen::VectorXd::Constant(3, kInf), Eigen::MatrixXd::Identity(3, 3)};
    const auto r = mc_region_log_prob(spec, 100, rng);
    CHECK(r.log_prob == 0.0);
    CHECK(r.rel_std_err == 0.0);
  }
  SUBCASE("deep joint tail is estimable and far below exp(-700)") {
    const int k = 40;
    TruncationSpec spec{Eigen::VectorXd::Constant(k, -8.0), Eigen::MatrixXd::Identity(k, k)};
    const auto r = mc_region_log_prob(spec, 4000, rng);
    const double expected = k * norm_log_cdf(-8.0);
    CHECK(std::abs(r.log_prob - expected) < 0.5);
    TiltedSequentialSampler sampler(spec);
    CHECK_THROWS_AS(sampler.sample(rng), std::runtime_error);
  }
}

TEST_CASE("estimator variance halves when the sample doubles") {
  RngStream rng(23);
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.4, 0.2, 0.4, 1.0, 0.5, 0.2, 0.5, 1.0;
  TruncationSpec spec{Eigen::VectorXd::Constant(3, 0.3), sigma};
  const int reps = 50;
  auto variance_of = [&](int n_mc) {
    std::vector<double> est(reps);
    for (int r = 0; r < reps; ++r) est[r] = mc_region_log_prob(spec, n_mc, rng).log_prob;
    const auto st = oracles::scalar_moments(est);
    return st.sd[0] * st.sd[0];
  };
  const double v1 = variance_of(256);
  const double v2 = variance_of(512);
  CHECK(v1 / v2 > 2.0 / 1.5);
  CHECK(v1 / v2 < 2.0 * 1.5);
}

TEST_CASE("low-rank kernel matches the dense kernel's target") {
  RngStream rng(31);
  const int d = 12, p = 2;
  Eigen::MatrixXd b(d, p);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < p; ++j) b(i, j) = rng.normal();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(d, 0.8);
  v[3] = 2.5;
  const Eigen::MatrixXd sigma = Eigen::MatrixXd(v.asDiagonal()) + b * b.transpose();
  Eigen::VectorXd upper(d);
  for (int i = 0; i < d; ++i) upper[i] = 0.5 + rng.uniform();
  TruncationSpec spec{upper, sigma};

  // Exact sampler as the reference.
  TiltedSequentialSampler exact(spec);
  std::vector<Eigen::VectorXd> ref(20000);
  for (auto& x : ref) x = exact.sample(rng);
  const auto ref_m = oracles::moments(ref);

  TmvnGibbsKernel kernel;
  kernel.reset(upper.array() - 1.0);
  for (int burn = 0; burn < 200; ++burn) kernel.step_low_rank(v, b, upper, 5, rng);
  std::vector<Eigen::VectorXd> low(30000);
  for (auto& x : low) {
    x = kernel.step_low_rank(v, b, upper, 5, rng);
    for (int i = 0; i < d; ++i) CHECK(x[i] <= upper[i]);
  }
  const auto low_m = oracles::moments(low);
  for (int i = 0; i < d; ++i) {
    const double se = 4.0 * low_m.se[i] + 4.0 * ref_m.se[i];
    INFO("i=", i, " low=", low_m.mean[i], " exact=", ref_m.mean[i]);
    CHECK(std::abs(low_m.mean[i] - ref_m.mean[i]) < se);
  }
}

TEST_CASE("coordinate-Gibbs kernel leaves the target invariant") {
  RngStream rng(29);
  Eigen::MatrixXd sigma(3, 3);
  sigma << 2.0, 0.8, -0.3, 0.8, 1.5, 0.4, -0.3, 0.4, 1.0;
  Eigen::VectorXd upper(3);
  upper << 0.5, 0.0, 1.2;
  TruncationSpec spec{upper, sigma};

  TmvnGibbsKernel kernel;
  kernel.reset(upper.array() - 1.0);
  // burn in
  for (int i = 0; i < 200; ++i) kernel.step(spec, 5, rng);
  const long n = 40000;
  std::vector<Eigen::VectorXd> draws(n);
  for (auto& x : draws) {
    x = kernel.step(spec, 5, rng);
    for (int j = 0; j < 3; ++j) CHECK(x[j] <= upper[j]);
  }
  const auto kern = oracles::moments(draws);
  const auto orc = oracles::moments(oracles::naive_tmvn_upper(upper, sigma, 40000, rng));
  for (int j = 0; j < 3; ++j) {
    // Kernel draws are autocorrelated; allow a generous factor on the se.
    const double se = 4.0 * kern.se[j] + 4.0 * orc.se[j];
    CHECK(std::abs(kern.mean[j] - orc.mean[j]) < se);
  }
  CHECK_THROWS_AS(
      kernel.step({Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4).eval()}, 1, rng),
      std::logic_error);
}
