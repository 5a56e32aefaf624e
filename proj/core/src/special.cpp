#include "psun/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace psun {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrtTwoPi; }

double norm_log_pdf(double x) { return -0.5 * x * x - 0.5 * kLogTwoPi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows for x < -26.6, as it must.
    const double e = std::exp(x * x);
    return 2.0 * e - erfcx(-x);
  }
  if (x < 4.0) return std::exp(x * x) * std::erfc(x);
  // Laplace continued fraction, evaluated bottom-up. Depth 40 gives full
  // double precision for x >= 4.
  double cf = 0.0;
  for (int k = 40; k >= 1; --k) cf = 0.5 * k / (x + cf);
  constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;
  return kInvSqrtPi / (x + cf);
}

double norm_log_cdf(double x) {
  if (x >= 0.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
  // Phi(x) = 0.5 erfcx(-x/sqrt2) exp(-x^2/2)
  return std::log(0.5 * erfcx(-x / kSqrt2)) - 0.5 * x * x;
}

double log_normal_interval_prob(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("log_normal_interval_prob: requires a < b");
  if (a == -kInf && b == kInf) return 0.0;
  if (a == -kInf) return norm_log_cdf(b);
  if (b == kInf) return norm_log_cdf(-a);
  if (a > 0.0) {
    const double pa = norm_log_cdf(-a);
    const double pb = norm_log_cdf(-b);
    return pa + log1mexp(pb - pa);
  }
  if (b < 0.0) return log_normal_interval_prob(-b, -a);
  // a <= 0 <= b: 1 - Phi(a) - Phi(-b), both terms at most 1/2.
  const double pa = 0.5 * std::erfc(-a / kSqrt2);
  const double pb = 0.5 * std::erfc(b / kSqrt2);
  return std::log1p(-(pa + pb));
}

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("norm_quantile: p must lie in (0,1)");
  if (p == 0.5) return 0.0;
  const bool flip = p > 0.5;
  const double q = flip ? 1.0 - p : p;
  // Crude tail start, then Newton on log Phi(x) = log q.
  double x = -std::sqrt(-2.0 * std::log(q));
  const double lq = std::log(q);
  for (int it = 0; it < 100; ++it) {
    const double g = norm_log_cdf(x) - lq;
    const double dg = std::exp(norm_log_pdf(x) - norm_log_cdf(x));
    const double step = g / dg;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return flip ? -x : x;
}

double logistic_cdf(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_log_cdf(double x) {
  if (x > -33.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double logistic_pdf(double x) {
  const double e = std::exp(-std::abs(x));
  const double d = 1.0 + e;
  return e / (d * d);
}

double logistic_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("logistic_quantile: p must lie in (0,1)");
  return std::log(p / (1.0 - p));
}

double log1mexp(double x) {
  if (!(x < 0.0)) {
    if (x == 0.0) return -kInf;
    throw std::invalid_argument("log1mexp: requires x < 0");
  }
  if (x > -0.693147180559945) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

namespace {

// Rayleigh-proposal draw from N(0,1) restricted to [a,b] with a large.
double tail_truncated_normal(double a, double b, RngStream& rng) {
  const double c = 0.5 * a * a;
  const double f = (b == kInf) ? -1.0 : std::expm1(c - 0.5 * b * b);
  for (;;) {
    const double t = c - std::log1p(rng.uniform() * f);
    const double v = rng.uniform();
    if (v * v * t <= c) return std::sqrt(2.0 * t);
  }
}

}  // namespace

double truncated_std_normal(double lower, double upper, RngStream& rng) {
  if (!(lower < upper)) throw std::invalid_argument("truncated_std_normal: requires lower < upper");
  constexpr double kTail = 0.66;
  if (lower > kTail) return tail_truncated_normal(lower, upper, rng);
  if (upper < -kTail) return -tail_truncated_normal(-upper, -lower, rng);
  // Central region. Use plain rejection when the interval holds enough mass,
  // otherwise a uniform proposal against the dominating density value.
  if (upper - lower > 0.40) {
    for (;;) {
      const double x = rng.normal();
      if (x >= lower && x <= upper) return x;
    }
  }
  const double m2 = (lower > 0.0) ? lower * lower : (upper < 0.0 ? upper * upper : 0.0);
  for (;;) {
    const double x = lower + (upper - lower) * rng.uniform();
    if (std::log(rng.uniform()) <= 0.5 * (m2 - x * x)) return x;
  }
}

}  // namespace psun
