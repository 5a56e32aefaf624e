#pragma once

#include "psun/rng.hpp"

namespace psun {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLogTwoPi = 1.837877066409345483560659472811235279;
inline constexpr double kSqrtTwoPi = 2.506628274631000502415765284811045253;

double norm_pdf(double x);
double norm_log_pdf(double x);
double norm_cdf(double x);

// Scaled complementary error function exp(x^2) erfc(x), valid for all x for
// which the result is representable.
double erfcx(double x);

// log Phi(x), accurate in both tails (no underflow for x down to -1e154).
double norm_log_cdf(double x);

// log( Phi(b) - Phi(a) ) for a < b, stable when both endpoints sit in the
// same far tail. Infinite endpoints are allowed.
double log_normal_interval_prob(double a, double b);

// Inverse of norm_cdf, computed by log-space Newton iteration.
double norm_quantile(double p);

double logistic_cdf(double x);
double logistic_log_cdf(double x);
double logistic_pdf(double x);
double logistic_quantile(double p);

// Draw from the standard normal truncated to [lower, upper]; either bound
// may be infinite. Exact rejection sampling (Rayleigh tail method for far
// tails, normal or uniform rejection otherwise).
double truncated_std_normal(double lower, double upper, RngStream& rng);

// log(1 - exp(x)) for x < 0.
double log1mexp(double x);

}  // namespace psun
