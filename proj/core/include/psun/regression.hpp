#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "psun/psun.hpp"

namespace psun {

enum class Link { kProbit, kLogit };

// Design matrix, binary response, link. The first column is treated as the
// intercept when it is constant.
struct BinaryDesign {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  Link link = Link::kProbit;
  std::vector<std::string> names;

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
  // Signs 2 y_i - 1, the diagonal of B_y.
  Eigen::VectorXd signs() const;
  // allow_constant_columns permits degenerate designs whose null-space
  // behaviour is itself of interest (exact-sampler use).
  void validate(bool allow_constant_columns = false) const;
};

enum class PriorFamily {
  kGaussian,
  kLaplaceIndep,
  kCauchy,
  kDirichletLaplace,
  kGaussianSage,  // the reference Gaussian with all diagonal entries 16
};

struct PriorSpec {
  PriorFamily family = PriorFamily::kGaussian;
  Eigen::MatrixXd omega;  // p x p; diagonal except for the Gaussian family
  Eigen::VectorXd xi;     // defaults to zero
  int m = 0;              // latent prior dimension; the recipes all use 0
  int dl_grid = 300;

  void validate(int p) const;
  MixingLaw w_law(int p) const;
};

// Hyperparameter recipes: diagonal omega values per (link, family), the
// Dirichlet-Laplace identity-omega setting, and the reference all-16
// Gaussian. The Cauchy family has no published values and must be supplied
// by the caller.
PriorSpec prior_from_recipe(Link link, PriorFamily family, int p);

// sum_i log Lambda((2 y_i - 1) x_i' beta), with numerically stable log CDFs.
double log_likelihood(const BinaryDesign& design, const Eigen::VectorXd& beta);

struct PosteriorPsun {
  PsunDistribution dist;
  BinaryDesign design;
};

// Conjugate posterior assembly: theta* = blockdiag(theta, I_n),
// A* = stack(A, B_y X diag^{1/2}(Omega)), b* = stack(b, B_y X xi), and the
// V law extended by n link components (point mass for probit,
// logistic-Kolmogorov for logit).
PosteriorPsun build_posterior(const BinaryDesign& design, const PriorSpec& prior);

struct FitConfig {
  long iters = 10000;
  long burnin = 1000;
  int thin = 1;
  int chains = 1;
  std::uint64_t seed = 1;
  bool store_traces = false;
  GibbsConfig gibbs;
  int max_threads = 0;
};

DrawMatrix fit_gibbs(const BinaryDesign& design, const PriorSpec& prior, const FitConfig& cfg);

// Componentwise prior for the exact sampler: U_2 has i.i.d. symmetric
// components scale * G with G standard logistic or standard Gaussian.
enum class ComponentPrior { kLogistic, kGaussian };
struct ExactPriorSpec {
  ComponentPrior g2_star = ComponentPrior::kLogistic;
  double scale = 1.0;
};

// i.i.d. posterior draws via the reflection scheme, valid when X X' is
// invertible and the prior is beta = X'(X X')^{-1} U_2.
DrawMatrix fit_exact_iid(const BinaryDesign& design, const ExactPriorSpec& prior, long n_draws,
                         RngStream& rng);

// P(Y = y) as the normalizing probability of the assembled posterior.
LogProbEstimate log_marginal_likelihood(const BinaryDesign& design, const PriorSpec& prior,
                                        int n_mc, RngStream& rng);

struct StandardizeRecord {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;  // multiplicative factors applied after centering
  bool intercept = false;
};

// Center covariates to mean 0 and rescale to standard deviation 0.5
// (sample standard deviation, n-1 denominator); optionally prepend an
// intercept column of ones.
std::pair<Eigen::MatrixXd, StandardizeRecord> standardize(const Eigen::MatrixXd& x_raw,
                                                          bool add_intercept);

// Rescale columns to standard deviation 0.5 without centering.
Eigen::MatrixXd rescale_sd_half(const Eigen::MatrixXd& x);

// Posterior predictive p(y = 1 | x_new) as the draw average of Lambda(x'beta).
double predict_prob(const Eigen::VectorXd& x_new, Link link, const DrawMatrix& draws);

}  // namespace psun
