#include "psun/mixing_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psun/logistic_kolmogorov.hpp"
#include "psun/special.hpp"

namespace psun {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Ratio-of-uniforms without mode shift for the standardized two-parameter
// density z^{lambda-1} exp(-omega (z + 1/z)/2). Efficient for moderate
// lambda and omega.
double gig_rou_noshift(double lambda, double omega, RngStream& rng) {
  const double xm = ((lambda - 1.0) + std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega)) / omega;
  const double log_gxm = (lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm);
  auto qfn = [&](double x) {
    return (lambda - 1.0) * std::log(x) - 0.5 * omega * (x + 1.0 / x) - log_gxm;
  };
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = ym * std::exp(0.5 * qfn(ym));
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (2.0 * std::log(v) <= qfn(x)) return x;
  }
}

// Rejection from a three-piece exponential hat of the log-concave density of
// s = log z: h(s) = lambda s - omega cosh(s). Acceptance is bounded away
// from zero uniformly in (lambda, omega), which covers the regimes where
// plain ratio-of-uniforms degrades (omega or lambda tiny or huge).
double gig_log_concave(double lambda, double omega, RngStream& rng) {
  const double s_star = std::asinh(lambda / omega);
  const double h_star = lambda * s_star - std::sqrt(lambda * lambda + omega * omega);
  const double sigma = std::pow(lambda * lambda + omega * omega, -0.25);
  auto h = [&](double s) { return lambda * s - omega * std::cosh(s) - h_star; };

  const double delta = 1.5 * sigma;
  const double sl = s_star - delta, sr = s_star + delta;
  const double kl = lambda - omega * std::sinh(sl);   // > 0
  const double kr = lambda - omega * std::sinh(sr);   // < 0
  const double hl = h(sl), hr = h(sr);
  // Piece masses relative to exp(h_star).
  const double ml = std::exp(hl) / kl;
  const double mc = sr - sl;
  const double mr = std::exp(hr) / (-kr);
  const double total = ml + mc + mr;
  for (;;) {
    const double pick = total * rng.uniform();
    double s, log_hat;
    if (pick < ml) {
      s = sl + std::log(rng.uniform()) / kl;
      log_hat = hl + kl * (s - sl);
    } else if (pick < ml + mc) {
      s = sl + mc * rng.uniform();
      log_hat = 0.0;
    } else {
      s = sr + std::log(rng.uniform()) / kr;
      log_hat = hr + kr * (s - sr);
    }
    if (std::log(rng.uniform()) <= h(s) - log_hat) return std::exp(s);
  }
}

double gig_standardized(double lambda, double omega, RngStream& rng) {
  if ((lambda >= 1.0 || omega >= 1.0) && lambda <= 8.0 && omega <= 8.0)
    return gig_rou_noshift(lambda, omega, rng);
  return gig_log_concave(lambda, omega, rng);
}

}  // namespace

double gig_sample(double lambda, double chi, double psi, RngStream& rng) {
  require(chi >= 0.0 && psi >= 0.0, "gig_sample: chi and psi must be nonnegative");
  require(chi > 0.0 || psi > 0.0, "gig_sample: chi and psi cannot both be zero");
  if (chi == 0.0) {
    require(lambda > 0.0, "gig_sample: chi = 0 requires lambda > 0");
    return rng.gamma(lambda, 0.5 * psi);
  }
  if (psi == 0.0) {
    require(lambda < 0.0, "gig_sample: psi = 0 requires lambda < 0");
    return rng.inverse_gamma(-lambda, 0.5 * chi);
  }
  if (lambda == -0.5) return rng.inverse_gaussian(std::sqrt(chi / psi), chi);
  if (lambda == 0.5) return 1.0 / rng.inverse_gaussian(std::sqrt(psi / chi), psi);
  if (lambda < 0.0) return 1.0 / gig_sample(-lambda, psi, chi, rng);
  const double omega = std::sqrt(chi * psi);
  const double alpha = std::sqrt(chi / psi);
  return alpha * gig_standardized(lambda, omega, rng);
}

MixingLaw MixingLaw::point_mass(double value, int dimension) {
  require(value > 0.0, "MixingLaw: point mass value must be > 0");
  require(dimension >= 0, "MixingLaw: dimension must be >= 0");
  MixingLaw law;
  law.kind = MixingKind::kPointMass;
  law.dimension = dimension;
  law.value = value;
  return law;
}

MixingLaw MixingLaw::exponential(double rate, int dimension) {
  require(rate > 0.0, "MixingLaw: exponential rate must be > 0");
  require(dimension >= 0, "MixingLaw: dimension must be >= 0");
  MixingLaw law;
  law.kind = MixingKind::kExponential;
  law.dimension = dimension;
  law.rate = rate;
  return law;
}

MixingLaw MixingLaw::inverse_gamma(double shape, double scale, int dimension) {
  require(shape > 0.0 && scale > 0.0, "MixingLaw: inverse-gamma shape and scale must be > 0");
  require(dimension >= 0, "MixingLaw: dimension must be >= 0");
  MixingLaw law;
  law.kind = MixingKind::kInverseGamma;
  law.dimension = dimension;
  law.shape = shape;
  law.scale = scale;
  return law;
}

MixingLaw MixingLaw::logistic_kolmogorov(int dimension) {
  require(dimension >= 0, "MixingLaw: dimension must be >= 0");
  MixingLaw law;
  law.kind = MixingKind::kLogisticKolmogorov;
  law.dimension = dimension;
  return law;
}

MixingLaw MixingLaw::dirichlet_laplace(int grid_size, int dimension) {
  require(grid_size >= 1, "MixingLaw: grid_size must be >= 1");
  require(dimension >= 1, "MixingLaw: dirichlet-laplace dimension must be >= 1");
  MixingLaw law;
  law.kind = MixingKind::kDirichletLaplace;
  law.dimension = dimension;
  law.grid_size = grid_size;
  return law;
}

double MixingLaw::mean_or(double fallback) const {
  switch (kind) {
    case MixingKind::kPointMass:
      return value;
    case MixingKind::kExponential:
      return 1.0 / rate;
    case MixingKind::kInverseGamma:
      return shape > 1.0 ? scale / (shape - 1.0) : fallback;
    case MixingKind::kLogisticKolmogorov:
      return kPi * kPi / 3.0;
    case MixingKind::kDirichletLaplace:
      return fallback;
  }
  return fallback;
}

DlState DlState::prior_init(int p, int grid_size, RngStream& rng) {
  DlState st;
  st.grid_size = grid_size;
  const int j = 1 + static_cast<int>(rng.uniform() * grid_size);
  st.a = static_cast<double>(std::min(j, grid_size)) / grid_size;
  st.psi.resize(p);
  double sum = 0.0;
  for (int i = 0; i < p; ++i) {
    // tiny concentrations underflow; the floor keeps squares positive
    st.psi[i] = std::max(rng.gamma(st.a, 1.0), 1e-120);
    sum += st.psi[i];
  }
  st.psi /= sum;
  for (int i = 0; i < p; ++i) st.psi[i] = std::max(st.psi[i], 1e-120);
  st.tau = rng.gamma(p * st.a, 0.5);
  return st;
}

Eigen::VectorXd sample_prior(const MixingLaw& law, RngStream& rng) {
  Eigen::VectorXd out(law.dimension);
  switch (law.kind) {
    case MixingKind::kPointMass:
      out.setConstant(law.value);
      break;
    case MixingKind::kExponential:
      for (int i = 0; i < law.dimension; ++i) out[i] = rng.exponential(law.rate);
      break;
    case MixingKind::kInverseGamma:
      for (int i = 0; i < law.dimension; ++i) out[i] = rng.inverse_gamma(law.shape, law.scale);
      break;
    case MixingKind::kLogisticKolmogorov:
      for (int i = 0; i < law.dimension; ++i) out[i] = lk_prior_sample(rng);
      break;
    case MixingKind::kDirichletLaplace: {
      DlState st = DlState::prior_init(law.dimension, law.grid_size, rng);
      for (int i = 0; i < law.dimension; ++i) {
        const double loc = rng.exponential(0.5);
        out[i] = loc * st.psi[i] * st.psi[i] * st.tau * st.tau;
      }
      break;
    }
  }
  return out;
}

double scale_full_conditional_scalar(const MixingLaw& law, double obs, RngStream& rng) {
  switch (law.kind) {
    case MixingKind::kPointMass:
      return law.value;
    case MixingKind::kExponential:
      return gig_sample(0.5, obs * obs, 2.0 * law.rate, rng);
    case MixingKind::kInverseGamma:
      return rng.inverse_gamma(law.shape + 0.5, law.scale + 0.5 * obs * obs);
    case MixingKind::kLogisticKolmogorov:
      return sample_v_given_t(obs, rng).v;
    case MixingKind::kDirichletLaplace:
      throw std::invalid_argument("scale_full_conditional_scalar: dirichlet-laplace needs its hierarchical state");
  }
  throw std::logic_error("scale_full_conditional_scalar: unreachable");
}

Eigen::VectorXd w_full_conditional(const MixingLaw& law, const Eigen::VectorXd& z,
                                   const Eigen::VectorXd& omega_bar_diag, RngStream& rng,
                                   DlState* dl) {
  require(z.size() == law.dimension, "w_full_conditional: z length mismatch");
  require(omega_bar_diag.size() == law.dimension, "w_full_conditional: omega_bar length mismatch");
  Eigen::VectorXd w(law.dimension);
  if (law.kind == MixingKind::kDirichletLaplace) {
    require(dl != nullptr, "w_full_conditional: dirichlet-laplace needs a DlState");
    require((omega_bar_diag.array() - 1.0).abs().maxCoeff() < 1e-12,
            "w_full_conditional: dirichlet-laplace requires unit omega_bar");
    *dl = dl_update(*dl, z, rng);
    for (int j = 0; j < law.dimension; ++j) {
      const double bj = std::max(std::abs(z[j]), 1e-280);
      const double s = dl->psi[j] * dl->tau;
      const double ratio = bj / s;  // well scaled even when both are tiny
      const double loc = gig_sample(0.5, ratio * ratio, 1.0, rng);
      w[j] = loc * s * s;
    }
    return w;
  }
  for (int j = 0; j < law.dimension; ++j) {
    w[j] = scale_full_conditional_scalar(law, z[j] / std::sqrt(omega_bar_diag[j]), rng);
  }
  return w;
}

DlState dl_update(const DlState& state, const Eigen::VectorXd& beta_scaled, RngStream& rng) {
  const int p = static_cast<int>(beta_scaled.size());
  require(state.psi.size() == p, "dl_update: dimension mismatch");
  const int grid = state.grid_size;

  // Floor only against the exact chi = 0 boundary; anything larger would
  // feed spurious information into the near-one-hot small-a regime.
  Eigen::VectorXd abs_b(p);
  for (int j = 0; j < p; ++j) abs_b[j] = std::max(std::abs(beta_scaled[j]), 1e-280);

  DlState next = state;

  // Simplex via normalized GIG draws.
  double tsum = 0.0;
  for (int j = 0; j < p; ++j) {
    next.psi[j] = gig_sample(state.a - 1.0, 2.0 * abs_b[j], 1.0, rng);
    tsum += next.psi[j];
  }
  next.psi /= tsum;
  for (int j = 0; j < p; ++j) next.psi[j] = std::max(next.psi[j], 1e-120);

  // Global scale.
  double ratio_sum = 0.0;
  for (int j = 0; j < p; ++j) ratio_sum += abs_b[j] / next.psi[j];
  next.tau = gig_sample(static_cast<double>(p) * state.a - p, 2.0 * ratio_sum, 1.0, rng);

  // Concentration on the grid {j/grid}.
  const double sum_log_psi = next.psi.array().log().sum();
  const double log_tau = std::log(next.tau);
  std::vector<double> logit(grid);
  double max_logit = -std::numeric_limits<double>::infinity();
  constexpr double kLogHalf = -0.693147180559945309417232121458;
  for (int j = 1; j <= grid; ++j) {
    const double a = static_cast<double>(j) / grid;
    const double l = -p * std::lgamma(a) + (a - 1.0) * sum_log_psi + p * a * kLogHalf + p * a * log_tau;
    logit[j - 1] = l;
    max_logit = std::max(max_logit, l);
  }
  double norm = 0.0;
  for (double& l : logit) {
    l = std::exp(l - max_logit);
    norm += l;
  }
  const double u = norm * rng.uniform();
  double cum = 0.0;
  int pick = grid;
  for (int j = 1; j <= grid; ++j) {
    cum += logit[j - 1];
    if (u <= cum) {
      pick = j;
      break;
    }
  }
  next.a = static_cast<double>(pick) / grid;
  return next;
}

}  // namespace psun
