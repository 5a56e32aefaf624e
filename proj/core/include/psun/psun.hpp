#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "psun/mixing_laws.hpp"
#include "psun/rng.hpp"
#include "psun/tmvn.hpp"

namespace psun {

// Parameters of a perturbed unified skew-normal distribution on R^d with m
// latent conditioning components: Y = xi + diag^{1/2}(Omega) Z | (T <= A Z + b),
// Z a Q_W scale mixture with correlation Omega-bar, T a Q_V scale mixture
// with correlation Theta.
//
// q_v is a product of blocks (e.g. prior components followed by likelihood
// components after posterior assembly); block dimensions must sum to m.
struct PsunParams {
  int d = 1;
  int m = 0;
  std::vector<MixingLaw> q_v;
  Eigen::MatrixXd theta;  // m x m correlation
  Eigen::MatrixXd a_mat;  // m x d
  Eigen::VectorXd b_vec;  // m
  MixingLaw q_w;          // dimension d
  Eigen::MatrixXd omega;  // d x d SPD
  Eigen::VectorXd xi;     // d

  void validate() const;
  bool all_point_mass() const;

  // Convenience constructor for the unconditioned case (m = 0).
  static PsunParams scale_mixture(MixingLaw q_w, Eigen::MatrixXd omega, Eigen::VectorXd xi);
};

struct GibbsState {
  Eigen::VectorXd z;    // d
  Eigen::VectorXd t;    // m
  Eigen::VectorXd w;    // d
  Eigen::VectorXd v;    // m
  Eigen::VectorXd eps;  // m, eps = A z - t, carried for warm starts
  Eigen::VectorXd y;    // d
  std::optional<DlState> dl;
};

struct DensityEstimate {
  double log_density;
  double std_err;  // on the log scale
};

struct LogProbEstimate {
  double log_value;
  double rel_std_err;
  double value() const { return std::exp(log_value); }
  double std_err() const { return value() * rel_std_err; }
};

struct GibbsConfig {
  int exact_tmvn_max_dim = 200;  // exact minimax-tilted draws up to this dim
  int kernel_sweeps = 5;         // coordinate sweeps of the fallback kernel
};

struct ChainConfig {
  long iters = 10000;
  long burnin = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  bool store_traces = false;  // keep (W, V) alongside the Y draws
  GibbsConfig gibbs;
};

// Ordered posterior draws with chain and seed metadata.
struct DrawMatrix {
  Eigen::MatrixXd draws;           // one row per retained draw
  std::vector<int> chain;          // chain id per row
  std::vector<std::string> names;  // column names
  std::uint64_t seed = 0;
  std::optional<Eigen::MatrixXd> w_trace;
  std::optional<Eigen::MatrixXd> v_trace;
};

// Immutable distribution object; shareable across threads. Owns the cached
// normalizing probability Psi (expensive, reused across density calls).
class PsunDistribution {
 public:
  explicit PsunDistribution(PsunParams params);

  const PsunParams& params() const { return params_; }

  // Monte Carlo evaluation of the closed-form density: mixture Gaussian
  // density times mixture Gaussian CDF over the cached normalizer. Point
  // mass laws evaluate deterministically with zero reported error.
  DensityEstimate log_density(const Eigen::VectorXd& y, int n_mc, RngStream& rng) const;

  // Psi = P(T - A Z <= b), Rao-Blackwellized over the Gaussian layer.
  LogProbEstimate psi(int n_mc, RngStream& rng) const;

  GibbsState initial_state(RngStream& rng) const;

  // Derived quantities shared by the samplers.
  const Eigen::VectorXd& omega_diag_sqrt() const { return omega_diag_sqrt_; }
  const Eigen::MatrixXd& omega_bar() const { return omega_bar_; }
  bool omega_bar_identity() const { return omega_bar_identity_; }
  bool theta_diagonal() const { return theta_diagonal_; }
  const Eigen::MatrixXd& theta_chol() const { return theta_chol_; }
  const Eigen::LLT<Eigen::MatrixXd>& omega_bar_llt() const { return omega_bar_llt_; }
  double omega_bar_logdet() const { return omega_bar_logdet_; }

  Eigen::VectorXd sample_w_prior(RngStream& rng) const;
  Eigen::VectorXd sample_v_prior(RngStream& rng) const;

 private:
  PsunParams params_;
  Eigen::VectorXd omega_diag_sqrt_;
  Eigen::MatrixXd omega_bar_;
  Eigen::LLT<Eigen::MatrixXd> omega_bar_llt_;
  double omega_bar_logdet_ = 0.0;
  bool omega_bar_identity_ = true;
  bool theta_diagonal_ = true;
  Eigen::MatrixXd theta_chol_;

  mutable std::mutex psi_mutex_;
  mutable std::optional<LogProbEstimate> psi_cache_;
  mutable int psi_cache_n_mc_ = 0;
};

// One chain of the block Gibbs sampler of the pSUN distribution. Owns its
// state, random stream, and the warm-started truncated-normal machinery.
class GibbsChain {
 public:
  GibbsChain(const PsunDistribution& dist, GibbsConfig cfg, RngStream rng);
  ~GibbsChain();

  void step();
  const GibbsState& state() const { return state_; }
  GibbsState& state() { return state_; }

 private:
  struct Impl;
  const PsunDistribution* dist_;
  GibbsConfig cfg_;
  RngStream rng_;
  GibbsState state_;
  std::unique_ptr<Impl> scratch_;
};

// Spec-level free functions.
DensityEstimate psun_log_density(const PsunDistribution& dist, const Eigen::VectorXd& y, int n_mc,
                                 RngStream& rng);
LogProbEstimate psi_estimate(const PsunDistribution& dist, int n_mc, RngStream& rng);
GibbsState gibbs_step(const PsunDistribution& dist, const GibbsState& state, RngStream& rng,
                      const GibbsConfig& cfg = {});

// Runs one chain; deterministic given cfg.seed.
DrawMatrix sample_chain(const PsunDistribution& dist, const ChainConfig& cfg);

// Runs n_chains chains (threaded), chain c seeded with child(seed, c).
DrawMatrix sample_chains(const PsunDistribution& dist, const ChainConfig& cfg, int n_chains,
                         int max_threads = 0);

}  // namespace psun
