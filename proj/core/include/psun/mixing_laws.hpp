#pragma once

#include <Eigen/Dense>

#include "psun/rng.hpp"

namespace psun {

enum class MixingKind {
  kPointMass,
  kExponential,
  kInverseGamma,
  kLogisticKolmogorov,
  kDirichletLaplace,
};

// A positive mixing law governing `dimension` i.i.d. scale components.
// PointMass(1) gives the Gaussian layer back; Exponential(1/2) gives Laplace
// margins; InverseGamma(1/2,1/2) gives Cauchy margins; LogisticKolmogorov
// gives logistic margins; DirichletLaplace is the hierarchical shrinkage law.
struct MixingLaw {
  MixingKind kind = MixingKind::kPointMass;
  int dimension = 1;
  double value = 1.0;   // point mass location
  double rate = 0.5;    // exponential rate
  double shape = 0.5;   // inverse-gamma shape
  double scale = 0.5;   // inverse-gamma scale
  int grid_size = 300;  // Dirichlet concentration grid

  static MixingLaw point_mass(double value, int dimension);
  static MixingLaw exponential(double rate, int dimension);
  static MixingLaw inverse_gamma(double shape, double scale, int dimension);
  static MixingLaw logistic_kolmogorov(int dimension);
  static MixingLaw dirichlet_laplace(int grid_size, int dimension);

  bool is_point_mass() const { return kind == MixingKind::kPointMass; }

  // Prior mean of one component when finite, `fallback` otherwise.
  double mean_or(double fallback) const;
};

// Hierarchical state of the Dirichlet-Laplace law: simplex of local scale
// proportions, global scale, and the concentration parameter on its grid.
struct DlState {
  Eigen::VectorXd psi;
  double tau = 1.0;
  double a = 1.0;
  int grid_size = 300;

  static DlState prior_init(int p, int grid_size, RngStream& rng);
};

// One draw from the generalized inverse Gaussian density
//   f(x) ~ x^{lambda-1} exp(-(chi/x + psi x)/2),  x > 0.
// Boundary cases: chi = 0 requires lambda > 0 (Gamma); psi = 0 requires
// lambda < 0 (inverse Gamma). lambda = +-1/2 uses the inverse-Gaussian
// closed forms.
double gig_sample(double lambda, double chi, double psi, RngStream& rng);

// dimension i.i.d. prior draws from the law.
Eigen::VectorXd sample_prior(const MixingLaw& law, RngStream& rng);

// One component of the scale full conditional: obs | s ~ N(0, s), s ~ law.
double scale_full_conditional_scalar(const MixingLaw& law, double obs, RngStream& rng);

// Full conditional W | Z for Z_j | W_j ~ N(0, W_j omega_bar_jj). The
// Dirichlet-Laplace case updates *dl in place and requires unit omega_bar.
Eigen::VectorXd w_full_conditional(const MixingLaw& law, const Eigen::VectorXd& z,
                                   const Eigen::VectorXd& omega_bar_diag, RngStream& rng,
                                   DlState* dl = nullptr);

// One sweep of the Dirichlet-Laplace conditionals given the scaled
// coefficients: simplex via normalized GIG, global scale via GIG,
// concentration via its discrete full conditional on {j/grid : j=1..grid}.
DlState dl_update(const DlState& state, const Eigen::VectorXd& beta_scaled, RngStream& rng);

}  // namespace psun
