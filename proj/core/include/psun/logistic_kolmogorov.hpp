#pragma once

#include "psun/rng.hpp"

namespace psun {

// Constants of the logistic-Kolmogorov machinery. v_star is the branch
// switch point of the series representation; gamma is the fixed shape-rate
// constant pi^2/2 of the inverse-gamma proposal.
struct LkConstants {
  double v_star = 1.9834;
  double gamma = 4.934802200544679309417245499938;  // pi^2 / 2
  double series_tol = 1e-15;
  int max_terms = 100;
};

inline const LkConstants& lk_constants() {
  static const LkConstants c{};
  return c;
}

// Density of the logistic-Kolmogorov distribution, the law of 4 K^2 for K
// Kolmogorov-distributed. Mixing N(0,1) variance by this law gives the
// standard logistic. Two-branch series: theta-function form for v <= v_star,
// alternating exponential series beyond.
double lk_density(double v);
double lk_log_density(double v);

// CDF of the Kolmogorov distribution, K(x) = 1 - 2 sum_j (-1)^{j-1} e^{-2 j^2 x^2}.
double kolmogorov_cdf(double x);

// CDF of the logistic-Kolmogorov law: K(sqrt(v)/2).
double lk_cdf(double v);

// Prior draw by inverse-CDF bisection, accurate to 1e-12 in probability.
double lk_prior_sample(RngStream& rng);

// Proposal shape alpha as a function of |t| (piecewise numeric schedule).
double alpha_for_t(double abs_t);

// Envelope constant M*(alpha) bounding lk(v) / invgamma(v; alpha, pi^2/2).
double m_star(double alpha);
double log_m_star(double alpha);

struct RejectionProposal {
  double alpha;
  double gamma;
  double m_star;
};
RejectionProposal make_rejection_proposal(double abs_t);

struct VGivenTDraw {
  double v;
  long trials;
};

// Exact draw from V | T = t where T | V ~ N(0, V) and V ~ LK, by
// accept-reject from InvGamma(alpha + 1/2, gamma + t^2/2).
VGivenTDraw sample_v_given_t(double t, RngStream& rng);

}  // namespace psun
