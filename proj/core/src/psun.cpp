#include "psun/psun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "psun/mvn.hpp"
#include "psun/special.hpp"

namespace psun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int total_dim(const std::vector<MixingLaw>& blocks) {
  int s = 0;
  for (const auto& b : blocks) s += b.dimension;
  return s;
}

bool matrix_is_identity(const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j) - (i == j ? 1.0 : 0.0)) > 1e-13) return false;
  return true;
}

bool matrix_is_diagonal(const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > 1e-13) return false;
  return true;
}

// P(X <= upper) for X ~ N(0, sigma). Diagonal covariances evaluate exactly
// at any dimension. Non-diagonal ones use deterministic quadrature up to
// dimension 3 when the caller evaluates once (allow_quadrature), and the
// separation-of-variables estimator otherwise -- quadrature inside an outer
// Monte Carlo loop would dominate the cost for no variance benefit.
LogProbEstimate rect_log_prob(const Eigen::VectorXd& upper, const Eigen::MatrixXd& sigma,
                              int n_mc, RngStream& rng, bool allow_quadrature) {
  const int m = static_cast<int>(upper.size());
  if (m == 0 || (upper.array() == kInf).all()) return {0.0, 0.0};
  if (matrix_is_diagonal(sigma)) return {mvn_log_cdf_upper(upper, sigma), 0.0};
  if (m <= 3 && allow_quadrature) return {mvn_log_cdf_upper(upper, sigma), 0.0};
  const RegionLogProb r = mc_region_log_prob({upper, sigma}, n_mc, rng);
  return {r.log_prob, r.rel_std_err};
}

struct LogMeanAcc {
  std::vector<double> ls;
  void reserve(int n) { ls.reserve(n); }
  void add(double l) { ls.push_back(l); }
  // (log mean, relative standard error of the mean)
  std::pair<double, double> result() const {
    const int n = static_cast<int>(ls.size());
    double mx = -kInf;
    for (double l : ls) mx = std::max(mx, l);
    double s = 0.0, s2 = 0.0;
    for (double l : ls) {
      const double e = std::exp(l - mx);
      s += e;
      s2 += e * e;
    }
    const double mean = s / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    return {mx + std::log(mean), std::sqrt(var / n) / mean};
  }
};

}  // namespace

PsunParams PsunParams::scale_mixture(MixingLaw q_w, Eigen::MatrixXd omega, Eigen::VectorXd xi) {
  PsunParams p;
  p.d = static_cast<int>(xi.size());
  p.m = 0;
  p.q_w = std::move(q_w);
  p.omega = std::move(omega);
  p.xi = std::move(xi);
  p.theta.resize(0, 0);
  p.a_mat.resize(0, p.d);
  p.b_vec.resize(0);
  p.validate();
  return p;
}

void PsunParams::validate() const {
  if (d < 1) throw std::invalid_argument("PsunParams: d must be >= 1");
  if (m < 0) throw std::invalid_argument("PsunParams: m must be >= 0");
  if (total_dim(q_v) != m)
    throw std::invalid_argument("PsunParams: q_v block dimensions must sum to m");
  if (q_w.dimension != d) throw std::invalid_argument("PsunParams: q_w dimension must equal d");
  if (theta.rows() != m || theta.cols() != m)
    throw std::invalid_argument("PsunParams: theta must be m x m");
  if (a_mat.rows() != m || a_mat.cols() != d)
    throw std::invalid_argument("PsunParams: a_mat must be m x d");
  if (b_vec.size() != m) throw std::invalid_argument("PsunParams: b_vec must have length m");
  if (omega.rows() != d || omega.cols() != d)
    throw std::invalid_argument("PsunParams: omega must be d x d");
  if (xi.size() != d) throw std::invalid_argument("PsunParams: xi must have length d");
  for (int i = 0; i < m; ++i)
    if (std::abs(theta(i, i) - 1.0) > 1e-10)
      throw std::invalid_argument("PsunParams: theta must have unit diagonal");
  for (int i = 0; i < d; ++i)
    if (!(omega(i, i) > 0.0))
      throw std::invalid_argument("PsunParams: omega diagonal must be positive");
  if (m > 0 && (theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("PsunParams: theta must be symmetric");
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-10 * omega.diagonal().maxCoeff())
    throw std::invalid_argument("PsunParams: omega must be symmetric");
}

bool PsunParams::all_point_mass() const {
  if (!q_w.is_point_mass()) return false;
  for (const auto& b : q_v)
    if (!b.is_point_mass()) return false;
  return true;
}

PsunDistribution::PsunDistribution(PsunParams params) : params_(std::move(params)) {
  params_.validate();
  const int d = params_.d;
  omega_diag_sqrt_ = params_.omega.diagonal().cwiseSqrt();
  omega_bar_ = omega_diag_sqrt_.cwiseInverse().asDiagonal() * params_.omega *
               omega_diag_sqrt_.cwiseInverse().asDiagonal();
  omega_bar_ = 0.5 * (omega_bar_ + omega_bar_.transpose());
  omega_bar_identity_ = matrix_is_identity(omega_bar_);
  // omega is required to be positive definite, so no jitter here; the
  // near-singular safeguard belongs to sigma_eps only.
  omega_bar_llt_.compute(omega_bar_);
  if (omega_bar_llt_.info() != Eigen::Success)
    throw std::invalid_argument("PsunDistribution: omega is not positive definite");
  omega_bar_logdet_ = 0.0;
  for (int i = 0; i < d; ++i)
    omega_bar_logdet_ += 2.0 * std::log(omega_bar_llt_.matrixL()(i, i));
  theta_diagonal_ = params_.m == 0 || matrix_is_diagonal(params_.theta);
  if (params_.m > 0 && !theta_diagonal_) {
    theta_chol_ = jittered(params_.theta).llt().matrixL();
  }
  if (!omega_bar_identity_) {
    const auto k = params_.q_w.kind;
    if (k != MixingKind::kPointMass && k != MixingKind::kInverseGamma)
      throw std::invalid_argument(
          "PsunDistribution: non-diagonal omega-bar is supported only with point-mass or "
          "elliptical inverse-gamma W laws");
  }
  if (!theta_diagonal_) {
    for (const auto& b : params_.q_v)
      if (!b.is_point_mass())
        throw std::invalid_argument(
            "PsunDistribution: non-diagonal theta requires point-mass V components");
  }
}

Eigen::VectorXd PsunDistribution::sample_w_prior(RngStream& rng) const {
  if (!omega_bar_identity_ && params_.q_w.kind == MixingKind::kInverseGamma) {
    // Elliptical: one shared scale for the whole vector.
    const double w = rng.inverse_gamma(params_.q_w.shape, params_.q_w.scale);
    return Eigen::VectorXd::Constant(params_.d, w);
  }
  return sample_prior(params_.q_w, rng);
}

Eigen::VectorXd PsunDistribution::sample_v_prior(RngStream& rng) const {
  Eigen::VectorXd v(params_.m);
  int off = 0;
  for (const auto& b : params_.q_v) {
    v.segment(off, b.dimension) = sample_prior(b, rng);
    off += b.dimension;
  }
  return v;
}

namespace {

Eigen::MatrixXd sigma_eps_for(const PsunDistribution& dist, const Eigen::VectorXd& w,
                              const Eigen::VectorXd& v) {
  const PsunParams& P = dist.params();
  Eigen::MatrixXd s;
  if (dist.omega_bar_identity()) {
    s = P.a_mat * w.asDiagonal() * P.a_mat.transpose();
  } else {
    const Eigen::MatrixXd obw =
        w.cwiseSqrt().asDiagonal() * dist.omega_bar() * w.cwiseSqrt().asDiagonal();
    s = P.a_mat * obw * P.a_mat.transpose();
  }
  if (dist.theta_diagonal()) {
    s.diagonal() += v;
  } else {
    s += v.cwiseSqrt().asDiagonal() * P.theta * v.cwiseSqrt().asDiagonal();
  }
  return s;
}

}  // namespace

LogProbEstimate PsunDistribution::psi(int n_mc, RngStream& rng) const {
  const int m = params_.m;
  if (m == 0) return {0.0, 0.0};
  if ((params_.b_vec.array() == kInf).all()) return {0.0, 0.0};
  {
    std::lock_guard<std::mutex> lock(psi_mutex_);
    if (psi_cache_.has_value() && psi_cache_n_mc_ >= n_mc) return *psi_cache_;
  }

  LogProbEstimate out{};
  const bool v_const = std::all_of(params_.q_v.begin(), params_.q_v.end(),
                                   [](const MixingLaw& b) { return b.is_point_mass(); });
  const bool w_const = params_.q_w.is_point_mass();

  if (v_const && w_const) {
    RngStream degenerate(0);  // point-mass draws consume no randomness
    const Eigen::VectorXd w = sample_w_prior(degenerate);
    const Eigen::VectorXd v = sample_v_prior(degenerate);
    out = rect_log_prob(params_.b_vec, sigma_eps_for(*this, w, v), std::max(n_mc, 2), rng,
                        /*allow_quadrature=*/true);
  } else {
    const int outer = std::max(n_mc, 2);
    LogMeanAcc acc;
    acc.reserve(outer);
    for (int k = 0; k < outer; ++k) {
      const Eigen::VectorXd w = sample_w_prior(rng);
      const Eigen::VectorXd v = sample_v_prior(rng);
      acc.add(rect_log_prob(params_.b_vec, sigma_eps_for(*this, w, v), 128, rng,
                            /*allow_quadrature=*/false)
                  .log_value);
    }
    const auto [log_mean, rel_se] = acc.result();
    out = {log_mean, rel_se};
  }

  std::lock_guard<std::mutex> lock(psi_mutex_);
  psi_cache_ = out;
  psi_cache_n_mc_ = n_mc;
  return out;
}

DensityEstimate PsunDistribution::log_density(const Eigen::VectorXd& y, int n_mc,
                                              RngStream& rng) const {
  if (y.size() != params_.d) throw std::invalid_argument("log_density: y has wrong length");
  const int d = params_.d;
  const int m = params_.m;
  const Eigen::VectorXd zu = (y - params_.xi).cwiseQuotient(omega_diag_sqrt_);
  const double log_det_scale = omega_diag_sqrt_.array().log().sum();

  auto log_phi_given_w = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd x = zu.cwiseQuotient(w.cwiseSqrt());
    const double q = x.dot(omega_bar_llt_.solve(x));
    return -0.5 * (q + d * kLogTwoPi + omega_bar_logdet_) - log_det_scale -
           0.5 * w.array().log().sum();
  };
  double lphi, lphi_se = 0.0;
  if (params_.q_w.is_point_mass()) {
    lphi = log_phi_given_w(Eigen::VectorXd::Constant(d, params_.q_w.value));
  } else {
    LogMeanAcc acc;
    acc.reserve(n_mc);
    for (int k = 0; k < n_mc; ++k) acc.add(log_phi_given_w(sample_w_prior(rng)));
    std::tie(lphi, lphi_se) = acc.result();
  }

  double lcdf = 0.0, lcdf_se = 0.0;
  if (m > 0) {
    const Eigen::VectorXd s_vec = params_.a_mat * zu + params_.b_vec;
    const bool v_const = std::all_of(params_.q_v.begin(), params_.q_v.end(),
                                     [](const MixingLaw& b) { return b.is_point_mass(); });
    auto log_cdf_given_v = [&](const Eigen::VectorXd& v, bool allow_quadrature) {
      const Eigen::VectorXd upper = s_vec.cwiseQuotient(v.cwiseSqrt());
      return rect_log_prob(upper, params_.theta, 128, rng, allow_quadrature).log_value;
    };
    if (v_const) {
      RngStream degenerate(0);
      lcdf = log_cdf_given_v(sample_v_prior(degenerate), true);
    } else {
      LogMeanAcc acc;
      acc.reserve(n_mc);
      for (int k = 0; k < n_mc; ++k) acc.add(log_cdf_given_v(sample_v_prior(rng), false));
      std::tie(lcdf, lcdf_se) = acc.result();
    }
  }

  const LogProbEstimate psi_est = psi(n_mc, rng);
  const double log_f = lphi + lcdf - psi_est.log_value;
  const double se = std::sqrt(lphi_se * lphi_se + lcdf_se * lcdf_se +
                              psi_est.rel_std_err * psi_est.rel_std_err);
  if (std::isnan(log_f) || log_f == kInf)
    throw std::runtime_error("log_density: non-finite intermediate value");
  return {log_f, se};
}

GibbsState PsunDistribution::initial_state(RngStream& rng) const {
  GibbsState st;
  const int d = params_.d, m = params_.m;
  st.z = Eigen::VectorXd::Zero(d);
  st.w = Eigen::VectorXd::Constant(d, params_.q_w.mean_or(1.0));
  st.v = sample_v_prior(rng);
  st.eps.resize(m);
  for (int i = 0; i < m; ++i) st.eps[i] = std::max(-params_.b_vec[i], 0.0) + 1.0;
  st.t = -st.eps;
  st.y = params_.xi;
  if (params_.q_w.kind == MixingKind::kDirichletLaplace) {
    st.dl = DlState::prior_init(d, params_.q_w.grid_size, rng);
  }
  return st;
}

namespace detail {

struct GibbsScratch {
  TmvnGibbsKernel kernel;
  TiltWarmStart tilt_warm;
  std::unique_ptr<TiltedSequentialSampler> cached_exact;
  bool sigma_constant = false;
};

void gibbs_step_impl(const PsunDistribution& dist, GibbsState& st, RngStream& rng,
                     const GibbsConfig& cfg, GibbsScratch& scratch) {
  const PsunParams& P = dist.params();
  const int d = P.d, m = P.m;

  // V | T, componentwise.
  if (m > 0) {
    int off = 0;
    for (const auto& block : P.q_v) {
      for (int i = 0; i < block.dimension; ++i) {
        const int idx = off + i;
        st.v[idx] = block.is_point_mass()
                        ? block.value
                        : scale_full_conditional_scalar(block, st.t[idx], rng);
      }
      off += block.dimension;
    }
  }

  // W | Z.
  if (dist.omega_bar_identity()) {
    st.w = w_full_conditional(P.q_w, st.z, Eigen::VectorXd::Ones(d), rng,
                              st.dl.has_value() ? &*st.dl : nullptr);
  } else if (P.q_w.is_point_mass()) {
    st.w.setConstant(P.q_w.value);
  } else {
    // Elliptical inverse-gamma: one shared scale.
    const double q = st.z.dot(dist.omega_bar_llt().solve(st.z));
    const double w = rng.inverse_gamma(P.q_w.shape + 0.5 * d, P.q_w.scale + 0.5 * q);
    st.w.setConstant(w);
  }

  if (m == 0) {
    if (dist.omega_bar_identity()) {
      for (int j = 0; j < d; ++j) st.z[j] = std::sqrt(st.w[j]) * rng.normal();
    } else {
      Eigen::VectorXd n(d);
      for (int j = 0; j < d; ++j) n[j] = rng.normal();
      st.z = st.w.cwiseSqrt().asDiagonal() * (dist.omega_bar_llt().matrixL() * n).eval();
    }
    st.y = P.xi + dist.omega_diag_sqrt().cwiseProduct(st.z);
    return;
  }

  // In the kernel regime with diagonal structure and d << m, sigma_eps =
  // diag(v) + B B' (B = A diag^{1/2}(w)) is never formed: the coordinate
  // kernel and the conditional solve both go through the Woodbury identity.
  const bool low_rank = m > cfg.exact_tmvn_max_dim && dist.omega_bar_identity() &&
                        dist.theta_diagonal() && 2 * d < m;
  Eigen::MatrixXd sigma_eps;
  if (!low_rank) sigma_eps = sigma_eps_for(dist, st.w, st.v);
  Eigen::MatrixXd b_factor;
  if (low_rank) b_factor = P.a_mat * st.w.cwiseSqrt().asDiagonal();

  // eps-tilde = T - A Z is constrained to <= b; the carried eps field holds
  // A Z - T, so the feasible warm start is its negation.
  Eigen::VectorXd eps_tilde;
  bool drew_exact = false;
  if (m <= cfg.exact_tmvn_max_dim) {
    const TruncationSpec spec{P.b_vec, sigma_eps};
    try {
      if (scratch.sigma_constant) {
        if (!scratch.cached_exact)
          scratch.cached_exact = std::make_unique<TiltedSequentialSampler>(spec);
        eps_tilde = scratch.cached_exact->sample(rng, 200000);
      } else {
        TiltedSequentialSampler sampler(spec,
                                        scratch.tilt_warm.valid ? &scratch.tilt_warm : nullptr);
        eps_tilde = sampler.sample(rng, 200000);
        scratch.tilt_warm = sampler.warm_start();
      }
      drew_exact = true;
    } catch (const std::runtime_error&) {
      drew_exact = false;  // fall through to the kernel, which stays valid
    }
  }
  if (!drew_exact) {
    if (!scratch.kernel.has_state()) scratch.kernel.reset(-st.eps);
    if (low_rank) {
      eps_tilde = scratch.kernel.step_low_rank(st.v, b_factor, P.b_vec, cfg.kernel_sweeps, rng);
    } else {
      eps_tilde = scratch.kernel.step({P.b_vec, sigma_eps}, cfg.kernel_sweeps, rng);
    }
  } else {
    scratch.kernel.reset(eps_tilde);  // keep the kernel warm for later fallback
  }

  Eigen::LLT<Eigen::MatrixXd> sig_llt;
  if (!low_rank) {
    sig_llt.compute(jittered(sigma_eps));
    if (sig_llt.info() != Eigen::Success)
      throw std::runtime_error("gibbs_step: sigma_eps factorization failed");
  }

  if (dist.omega_bar_identity()) {
    // Structured exact draw of Z | eps-tilde, no d x d factorization:
    // u ~ N(0, diag(w)), delta ~ N(0, Theta_V),
    // z = u + diag(w) A' Sigma^{-1} (-eps_tilde - A u - delta).
    Eigen::VectorXd u(d);
    for (int j = 0; j < d; ++j) u[j] = std::sqrt(st.w[j]) * rng.normal();
    Eigen::VectorXd delta(m);
    if (dist.theta_diagonal()) {
      for (int i = 0; i < m; ++i) delta[i] = std::sqrt(st.v[i]) * rng.normal();
    } else {
      Eigen::VectorXd n(m);
      for (int i = 0; i < m; ++i) n[i] = rng.normal();
      delta = st.v.cwiseSqrt().asDiagonal() * (dist.theta_chol() * n).eval();
    }
    const Eigen::VectorXd rhs = -eps_tilde - P.a_mat * u - delta;
    const Eigen::VectorXd s =
        low_rank ? low_rank_solve(st.v, b_factor, low_rank_capacitance(st.v, b_factor), rhs)
                 : sig_llt.solve(rhs);
    st.z = u + st.w.cwiseProduct(P.a_mat.transpose() * s);
  } else {
    const Eigen::MatrixXd obw =
        st.w.cwiseSqrt().asDiagonal() * dist.omega_bar() * st.w.cwiseSqrt().asDiagonal();
    const Eigen::MatrixXd h_mu = sig_llt.solve(P.a_mat * obw).transpose();  // d x m
    Eigen::MatrixXd h_sigma = (Eigen::MatrixXd::Identity(d, d) - h_mu * P.a_mat) * obw;
    const Eigen::LLT<Eigen::MatrixXd> hs_llt(jittered(h_sigma));
    if (hs_llt.info() != Eigen::Success)
      throw std::runtime_error("gibbs_step: conditional covariance factorization failed");
    Eigen::VectorXd n(d);
    for (int j = 0; j < d; ++j) n[j] = rng.normal();
    st.z = h_mu * (-eps_tilde) + hs_llt.matrixL() * n;
  }

  const Eigen::VectorXd az = P.a_mat * st.z;
  st.t = az + eps_tilde;
  st.eps = -eps_tilde;
  st.y = P.xi + dist.omega_diag_sqrt().cwiseProduct(st.z);

  // Constraint preservation: T <= A Z + b, exact under monotone rounding.
  for (int i = 0; i < m; ++i) {
    if (!(st.t[i] <= az[i] + P.b_vec[i]))
      throw std::logic_error("gibbs_step: truncation constraint violated");
  }
}

}  // namespace detail

struct GibbsChain::Impl : detail::GibbsScratch {};

GibbsChain::GibbsChain(const PsunDistribution& dist, GibbsConfig cfg, RngStream rng)
    : dist_(&dist), cfg_(cfg), rng_(std::move(rng)) {
  state_ = dist.initial_state(rng_);
  scratch_ = std::make_unique<Impl>();
  scratch_->sigma_constant = dist.params().all_point_mass();
}

GibbsChain::~GibbsChain() = default;

void GibbsChain::step() { detail::gibbs_step_impl(*dist_, state_, rng_, cfg_, *scratch_); }

DensityEstimate psun_log_density(const PsunDistribution& dist, const Eigen::VectorXd& y, int n_mc,
                                 RngStream& rng) {
  return dist.log_density(y, n_mc, rng);
}

LogProbEstimate psi_estimate(const PsunDistribution& dist, int n_mc, RngStream& rng) {
  return dist.psi(n_mc, rng);
}

GibbsState gibbs_step(const PsunDistribution& dist, const GibbsState& state, RngStream& rng,
                      const GibbsConfig& cfg) {
  detail::GibbsScratch scratch;
  scratch.sigma_constant = false;
  GibbsState st = state;
  detail::gibbs_step_impl(dist, st, rng, cfg, scratch);
  return st;
}

DrawMatrix sample_chain(const PsunDistribution& dist, const ChainConfig& cfg) {
  if (!(cfg.iters > cfg.burnin) || cfg.burnin < 0 || cfg.thin < 1)
    throw std::invalid_argument("sample_chain: requires iters > burnin >= 0 and thin >= 1");
  GibbsChain chain(dist, cfg.gibbs, RngStream(cfg.seed));
  const long n_keep = (cfg.iters - cfg.burnin) / cfg.thin;
  DrawMatrix out;
  out.seed = cfg.seed;
  out.draws.resize(n_keep, dist.params().d);
  out.chain.assign(static_cast<std::size_t>(n_keep), 0);
  if (cfg.store_traces) {
    out.w_trace = Eigen::MatrixXd(n_keep, dist.params().d);
    out.v_trace = Eigen::MatrixXd(n_keep, dist.params().m);
  }
  long kept = 0;
  for (long it = 1; it <= cfg.iters && kept < n_keep; ++it) {
    chain.step();
    if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
      out.draws.row(kept) = chain.state().y.transpose();
      if (cfg.store_traces) {
        out.w_trace->row(kept) = chain.state().w.transpose();
        out.v_trace->row(kept) = chain.state().v.transpose();
      }
      ++kept;
    }
  }
  return out;
}

DrawMatrix sample_chains(const PsunDistribution& dist, const ChainConfig& cfg, int n_chains,
                         int max_threads) {
  if (n_chains < 1) throw std::invalid_argument("sample_chains: n_chains must be >= 1");
  std::vector<DrawMatrix> parts(n_chains);
  auto chain_cfg = [&](int c) {
    ChainConfig local = cfg;
    local.seed = mix_seed(cfg.seed) ^ mix_seed(static_cast<std::uint64_t>(c) + 1);
    return local;
  };
  if (n_chains == 1) {
    parts[0] = sample_chain(dist, chain_cfg(0));
  } else {
    const int hw =
        max_threads > 0 ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= n_chains) return;
        parts[c] = sample_chain(dist, chain_cfg(c));
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(hw, n_chains);
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  DrawMatrix out;
  out.seed = cfg.seed;
  const long per = parts[0].draws.rows();
  out.draws.resize(per * n_chains, dist.params().d);
  out.chain.resize(static_cast<std::size_t>(per) * n_chains);
  const bool traces = parts[0].w_trace.has_value();
  if (traces) {
    out.w_trace = Eigen::MatrixXd(per * n_chains, dist.params().d);
    out.v_trace = Eigen::MatrixXd(per * n_chains, dist.params().m);
  }
  for (int c = 0; c < n_chains; ++c) {
    out.draws.middleRows(c * per, per) = parts[c].draws;
    std::fill(out.chain.begin() + c * per, out.chain.begin() + (c + 1) * per, c);
    if (traces) {
      out.w_trace->middleRows(c * per, per) = *parts[c].w_trace;
      out.v_trace->middleRows(c * per, per) = *parts[c].v_trace;
    }
  }
  return out;
}

}  // namespace psun
