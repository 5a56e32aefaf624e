#include <doctest.h>

#include <cmath>
#include <vector>

#include "psun/logistic_kolmogorov.hpp"
#include "psun/quadrature.hpp"
#include "psun/special.hpp"
#include "support/oracles.hpp"

using namespace psun;

namespace {

double lk_integral(double lo, double hi, int power = 0) {
  auto f = [power](double v) { return std::pow(v, power) * lk_density(v); };
  const double vs = lk_constants().v_star;
  double acc = 0.0;
  double a = lo;
  for (double cut : {vs, 10.0, 50.0, 200.0, hi}) {
    if (cut <= a || cut > hi) continue;
    acc += integrate_adaptive(f, a, cut, 1e-11);
    a = cut;
  }
  return acc;
}

}  // namespace

TEST_CASE("density branches agree at the switch point") {
  const double vs = lk_constants().v_star;
  // Just below evaluates the theta-series branch, just above the
  // alternating branch; analytically the two representations coincide.
  const double below = lk_density(vs);
  const double above = lk_density(std::nextafter(vs, 10.0));
  CHECK(std::abs(below - above) < 1e-8);
  CHECK(below == doctest::Approx(0.2964046261348149).epsilon(1e-12));
}

TEST_CASE("density normalizes and has the logistic-variance mean") {
  CHECK(lk_integral(1e-6, 400.0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(lk_integral(1e-6, 400.0, 1) == doctest::Approx(kPi * kPi / 3.0).epsilon(1e-6));
}

TEST_CASE("density is nonnegative across fourteen decades") {
  for (int i = 0; i <= 10000; ++i) {
    const double v = std::pow(10.0, -4.0 + 7.0 * i / 10000.0);
    CHECK(lk_density(v) >= 0.0);
  }
  CHECK_THROWS_AS(lk_density(0.0), std::invalid_argument);
  CHECK_THROWS_AS(lk_density(-1.0), std::invalid_argument);
}

TEST_CASE("Kolmogorov CDF values and shape") {
  CHECK(kolmogorov_cdf(0.5) == doctest::Approx(0.0360547563351249).epsilon(1e-12));
  CHECK(kolmogorov_cdf(1.0) == doctest::Approx(0.7300003283226455).epsilon(1e-12));
  CHECK(kolmogorov_cdf(2.0) == doctest::Approx(0.9993290747442203).epsilon(1e-12));
  CHECK(kolmogorov_cdf(50.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_cdf(-1.0) == 0.0);
  double prev = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.005 * i;
    const double k = kolmogorov_cdf(x);
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("LK CDF equals the transformed Kolmogorov CDF") {
  for (double v : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double by_quadrature = lk_integral(1e-8, v);
    CHECK(std::abs(lk_cdf(v) - by_quadrature) < 1e-8);
  }
}

TEST_CASE("proposal shape schedule spot values") {
  CHECK(alpha_for_t(0.0) == doctest::Approx(1.99));
  CHECK(alpha_for_t(2.2878) == doctest::Approx(1.99));
  CHECK(alpha_for_t(3.0) == doctest::Approx(2.17));
  CHECK(alpha_for_t(4.0) == doctest::Approx(2.5190).epsilon(1e-12));
  CHECK(alpha_for_t(10.0) == doctest::Approx(0.4982 + 4.376 + 0.12).epsilon(1e-12));
  CHECK(alpha_for_t(100.0) == doctest::Approx(-0.3201 + 49.86).epsilon(1e-12));
}

TEST_CASE("envelope constant") {
  CHECK_THROWS_AS(m_star(1.49), std::invalid_argument);
  CHECK(m_star(1.99) == doctest::Approx(1.4377779994242796).epsilon(1e-10));
  CHECK(m_star(3.0) == doctest::Approx(2.4611666337251103).epsilon(1e-10));

  // At alpha = 3/2 the first-branch supremum is exactly 2.
  const double g = lk_constants().gamma;
  const double d1 = std::sqrt(2.0 * std::pow(kPi, 5)) * std::tgamma(1.5) / std::pow(g, 1.5);
  CHECK(d1 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(m_star(1.5) >= d1 * (1.0 - 1e-13));

  // Interior stationary point of the second branch for alpha >= pi - 1.
  const double vhat = 1.0 + 3.0 + std::sqrt(16.0 - kPi * kPi);
  CHECK(vhat == doctest::Approx(6.475963569786648).epsilon(1e-12));
}

TEST_CASE("envelope actually dominates the density ratio") {
  const double g = lk_constants().gamma;
  for (double alpha : {1.5, 1.99, 2.17, 3.0, 5.0, 25.0}) {
    const double lms = log_m_star(alpha);
    const double lg_norm = alpha * std::log(g) - std::lgamma(alpha);
    for (int i = 0; i <= 4000; ++i) {
      const double v = std::pow(10.0, -3.0 + 6.0 * i / 4000.0);
      const double log_prior = lg_norm - (alpha + 1.0) * std::log(v) - g / v;
      const double log_ratio = lk_log_density(v) - log_prior;
      CHECK(log_ratio <= lms + 1e-10);
    }
  }
}

TEST_CASE("prior sampler: mean and mixture identity") {
  RngStream rng(11);
  const long n = 100000;
  std::vector<double> v(n), t(n);
  for (long i = 0; i < n; ++i) {
    v[i] = lk_prior_sample(rng);
    t[i] = std::sqrt(v[i]) * rng.normal();
  }
  const auto vm = oracles::scalar_moments(v);
  CHECK(std::abs(vm.mean[0] - kPi * kPi / 3.0) < 0.05);

  // sqrt(V) N(0,1) must be standard logistic (1% KS level).
  const double d = oracles::ks_statistic(t, [](double x) { return logistic_cdf(x); });
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("conditional sampler: acceptance, mean, and distribution") {
  RngStream rng(23);

  SUBCASE("acceptance rate is high for moderate t") {
    for (double t : {0.0, 10.0}) {
      long trials = 0;
      const int n = 10000;
      for (int i = 0; i < n; ++i) trials += sample_v_given_t(t, rng).trials;
      CHECK(static_cast<double>(n) / trials >= 0.65);
    }
  }

  SUBCASE("conditional mean matches quadrature") {
    // E[V | T = t] by quadrature of v lk(v) phi(t/sqrt v)/sqrt v.
    const std::vector<std::pair<double, double>> expected = {
        {0.0, 2.7725887222397812}, {1.0, 2.9611789034857156},
        {5.0, 6.0438117633805909}, {20.0, 21.000000044314803}};
    for (const auto& [t, mean_oracle] : expected) {
      const int n = 20000;
      std::vector<double> vs(n);
      for (int i = 0; i < n; ++i) vs[i] = sample_v_given_t(t, rng).v;
      const auto st = oracles::scalar_moments(vs);
      CHECK(std::abs(st.mean[0] - mean_oracle) < 4.0 * st.se[0]);
    }
  }

  SUBCASE("distribution at t = 0 against the quadrature-normalized density") {
    auto cond = [](double v) { return lk_density(v) * norm_pdf(0.0) / std::sqrt(v); };
    const double vs = lk_constants().v_star;
    const double norm = integrate_adaptive(cond, 1e-9, vs, 1e-12) +
                        integrate_adaptive(cond, vs, 200.0, 1e-12);
    // cumulative CDF on a fine grid, then interpolate
    const int grid_n = 4000;
    std::vector<double> grid(grid_n + 1), cdf(grid_n + 1);
    grid[0] = 1e-9;
    cdf[0] = 0.0;
    for (int i = 1; i <= grid_n; ++i) {
      grid[i] = 60.0 * i / grid_n;
      cdf[i] = cdf[i - 1] + integrate_adaptive(cond, grid[i - 1], grid[i], 1e-12) / norm;
    }
    auto cdf_interp = [&](double v) {
      if (v <= grid[0]) return 0.0;
      if (v >= grid[grid_n]) return 1.0;
      const int idx = static_cast<int>(v / 60.0 * grid_n);
      const int lo = std::min(std::max(idx, 0), grid_n - 1);
      const double f = (v - grid[lo]) / (grid[lo + 1] - grid[lo]);
      return cdf[lo] + f * (cdf[lo + 1] - cdf[lo]);
    };
    const int n = 100000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = sample_v_given_t(0.0, rng).v;
    const double d = oracles::ks_statistic(draws, cdf_interp);
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
  }

  SUBCASE("rejects non-finite t") {
    CHECK_THROWS_AS(sample_v_given_t(std::numeric_limits<double>::infinity(), rng),
                    std::invalid_argument);
  }
}
