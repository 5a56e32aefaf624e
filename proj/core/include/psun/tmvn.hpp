#pragma once

#include <Eigen/Dense>
#include <vector>

#include "psun/rng.hpp"

namespace psun {

// One-sided rectangular truncation of a centred Gaussian: X ~ N(0, sigma)
// conditioned on X <= upper componentwise. Infinite upper bounds leave the
// component unconstrained.
struct TruncationSpec {
  Eigen::VectorXd upper;
  Eigen::MatrixXd sigma;
};

struct RegionLogProb {
  double log_prob;
  double rel_std_err;  // standard error of the probability estimate, relative
};

// Tilting solution exported in original variable order, used to warm-start
// the optimization across Gibbs iterations when sigma changes smoothly.
struct TiltWarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd mu;
  bool valid = false;
};

// Minimax exponentially tilted sequential sampler. Construction performs a
// greedy probability-ordered Cholesky and solves the tilting saddlepoint;
// sample() then accept-rejects tilted sequential proposals, and
// estimate_log_prob() runs the separation-of-variables estimator with the
// same proposal. When the saddlepoint solve fails the sampler falls back to
// zero tilting (plain sequential conditioning), which stays exact for
// sampling and unbiased for estimation, only less efficient.
class TiltedSequentialSampler {
 public:
  explicit TiltedSequentialSampler(const TruncationSpec& spec, const TiltWarmStart* warm = nullptr);

  Eigen::VectorXd sample(RngStream& rng, long max_trials = 1000000) const;
  RegionLogProb estimate_log_prob(int n_mc, RngStream& rng) const;

  double psi_star() const { return psi_star_; }
  bool converged() const { return converged_; }
  TiltWarmStart warm_start() const;

 private:
  void solve_tilting(const TiltWarmStart* warm);
  double propose(Eigen::VectorXd& eta, RngStream& rng) const;  // returns log weight

  int d_ = 0;
  Eigen::MatrixXd chol_;      // permuted lower Cholesky factor (unscaled)
  Eigen::VectorXd upper_;     // permuted bounds
  std::vector<int> perm_;     // perm_[i] = original index of position i
  Eigen::VectorXd us_;        // upper_ / diag(chol_)
  Eigen::MatrixXd lsc_;       // strictly lower, rows scaled by 1/diag
  Eigen::VectorXd x_, mu_;    // tilting solution, length d_ (last entries 0)
  double psi_star_ = 0.0;
  bool converged_ = false;
};

// Exact draw for the given truncation, a fresh sampler per call.
Eigen::VectorXd sample_tmvn_upper(const TruncationSpec& spec, RngStream& rng);

// Unbiased importance-sampling estimate of log P(X <= upper).
RegionLogProb mc_region_log_prob(const TruncationSpec& spec, int n_mc, RngStream& rng);

// Coordinate-Gibbs kernel leaving N(0, sigma) | X <= upper invariant.
// Holds the chain position across calls so the draw can be warm-started
// across outer Gibbs iterations; confined to one chain at a time.
class TmvnGibbsKernel {
 public:
  void reset(const Eigen::VectorXd& feasible);
  bool has_state() const { return state_.size() > 0; }
  const Eigen::VectorXd& state() const { return state_; }
  const Eigen::VectorXd& step(const TruncationSpec& spec, int sweeps, RngStream& rng);

  // Same kernel for sigma = diag(v) + B B' without forming sigma: the
  // conditional precisions come from the Woodbury identity, O(dim * rank)
  // per sweep after an O(dim * rank^2) setup.
  const Eigen::VectorXd& step_low_rank(const Eigen::VectorXd& v_diag, const Eigen::MatrixXd& b,
                                       const Eigen::VectorXd& upper, int sweeps, RngStream& rng);

 private:
  Eigen::VectorXd state_;
};

// sigma^{-1} r for sigma = diag(v) + B B', via Woodbury.
Eigen::VectorXd low_rank_solve(const Eigen::VectorXd& v_diag, const Eigen::MatrixXd& b,
                               const Eigen::LLT<Eigen::MatrixXd>& cap_llt,
                               const Eigen::VectorXd& r);

// Factorization of the capacitance I + B' diag(1/v) B.
Eigen::LLT<Eigen::MatrixXd> low_rank_capacitance(const Eigen::VectorXd& v_diag,
                                                 const Eigen::MatrixXd& b);

// Symmetrize and add the standard diagonal jitter before factorization.
Eigen::MatrixXd jittered(const Eigen::MatrixXd& sigma);

}  // namespace psun
