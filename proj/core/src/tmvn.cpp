#include "psun/tmvn.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "psun/special.hpp"

namespace psun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Greedy probability-ordered Cholesky: at each step pick the remaining
// variable with the smallest conditional truncation probability, given
// truncated-mean plug-ins for the variables already fixed.
void cholperm(Eigen::MatrixXd sig, Eigen::VectorXd u, Eigen::MatrixXd& L, Eigen::VectorXd& u_out,
              std::vector<int>& perm) {
  const int d = static_cast<int>(u.size());
  L.setZero(d, d);
  perm.resize(d);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXd xt = Eigen::VectorXd::Zero(d);

  for (int j = 0; j < d; ++j) {
    int best = j;
    double best_pr = kInf;
    for (int i = j; i < d; ++i) {
      double s2 = sig(i, i);
      for (int k = 0; k < j; ++k) s2 -= L(i, k) * L(i, k);
      const double s = std::sqrt(std::max(s2, 1e-14 * std::max(sig(i, i), 1.0)));
      double c = 0.0;
      for (int k = 0; k < j; ++k) c += L(i, k) * xt[k];
      const double pr = (u[i] == kInf) ? 0.0 : norm_log_cdf((u[i] - c) / s);
      if (pr < best_pr) {
        best_pr = pr;
        best = i;
      }
    }
    if (best != j) {
      sig.row(j).swap(sig.row(best));
      sig.col(j).swap(sig.col(best));
      L.row(j).head(j).swap(L.row(best).head(j));
      std::swap(u[j], u[best]);
      std::swap(perm[j], perm[best]);
    }
    double s2 = sig(j, j);
    for (int k = 0; k < j; ++k) s2 -= L(j, k) * L(j, k);
    if (!(s2 > 0.0)) s2 = 1e-14 * std::max(sig(j, j), 1.0);
    L(j, j) = std::sqrt(s2);
    for (int i = j + 1; i < d; ++i) {
      double v = sig(i, j);
      for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
    double c = 0.0;
    for (int k = 0; k < j; ++k) c += L(j, k) * xt[k];
    if (u[j] == kInf) {
      xt[j] = 0.0;
    } else {
      const double ut = (u[j] - c) / L(j, j);
      xt[j] = -std::exp(norm_log_pdf(ut) - norm_log_cdf(ut));
    }
  }
  u_out = u;
}

}  // namespace

Eigen::MatrixXd jittered(const Eigen::MatrixXd& sigma) {
  const int d = static_cast<int>(sigma.rows());
  Eigen::MatrixXd s = 0.5 * (sigma + sigma.transpose());
  const double jit = 1e-10 * s.trace() / std::max(d, 1);
  s.diagonal().array() += jit;
  return s;
}

TiltedSequentialSampler::TiltedSequentialSampler(const TruncationSpec& spec,
                                                 const TiltWarmStart* warm) {
  d_ = static_cast<int>(spec.upper.size());
  if (spec.sigma.rows() != d_ || spec.sigma.cols() != d_)
    throw std::invalid_argument("TiltedSequentialSampler: dimension mismatch");
  if (d_ == 0) {
    psi_star_ = 0.0;
    converged_ = true;
    return;
  }
  cholperm(jittered(spec.sigma), spec.upper, chol_, upper_, perm_);
  us_.resize(d_);
  lsc_.setZero(d_, d_);
  for (int i = 0; i < d_; ++i) {
    us_[i] = (upper_[i] == kInf) ? kInf : upper_[i] / chol_(i, i);
    for (int j = 0; j < i; ++j) lsc_(i, j) = chol_(i, j) / chol_(i, i);
  }
  solve_tilting(warm);
}

namespace {

struct TiltParts {
  Eigen::VectorXd ut;  // tilted standardized bounds
  Eigen::VectorXd lp;  // log Phi(ut)
  Eigen::VectorXd P;   // d lnNpr / d shift  (= -phi(ut)/Phi(ut) here)
  Eigen::VectorXd dP;
};

TiltParts tilt_parts(const Eigen::MatrixXd& lsc, const Eigen::VectorXd& us,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  const int d = static_cast<int>(us.size());
  TiltParts tp;
  tp.ut.resize(d);
  tp.lp.resize(d);
  tp.P.resize(d);
  tp.dP.resize(d);
  for (int i = 0; i < d; ++i) {
    double c = 0.0;
    for (int j = 0; j < i; ++j) c += lsc(i, j) * x[j];
    const double ut = (us[i] == kInf) ? kInf : us[i] - mu[i] - c;
    tp.ut[i] = ut;
    if (ut == kInf) {
      tp.lp[i] = 0.0;
      tp.P[i] = 0.0;
      tp.dP[i] = 0.0;
    } else {
      tp.lp[i] = norm_log_cdf(ut);
      const double pu = std::exp(norm_log_pdf(ut) - tp.lp[i]);
      tp.P[i] = -pu;
      tp.dP[i] = -tp.P[i] * tp.P[i] - ut * pu;
    }
  }
  return tp;
}

}  // namespace

void TiltedSequentialSampler::solve_tilting(const TiltWarmStart* warm) {
  x_ = Eigen::VectorXd::Zero(d_);
  mu_ = Eigen::VectorXd::Zero(d_);
  converged_ = (d_ <= 1);
  if (d_ > 1) {
    if (warm != nullptr && warm->valid && warm->x.size() == d_) {
      for (int i = 0; i < d_; ++i) {
        x_[i] = warm->x[perm_[i]];
        mu_[i] = warm->mu[perm_[i]];
      }
      x_[d_ - 1] = 0.0;
      mu_[d_ - 1] = 0.0;
    }
    const int n = d_ - 1;
    Eigen::VectorXd grad(2 * n);
    auto eval_grad = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                         Eigen::VectorXd& g) {
      const TiltParts tp = tilt_parts(lsc_, us_, x, mu);
      for (int k = 0; k < n; ++k) {
        double gx = -mu[k];
        for (int i = k + 1; i < d_; ++i) gx += tp.P[i] * lsc_(i, k);
        g[k] = gx;
        g[n + k] = mu[k] - x[k] + tp.P[k];
      }
      return tp;
    };
    TiltParts tp = eval_grad(x_, mu_, grad);
    double gnorm = grad.lpNorm<Eigen::Infinity>();
    bool ok = false;
    for (int it = 0; it < 100 && !ok; ++it) {
      if (gnorm < 1e-9) {
        ok = true;
        break;
      }
      // Jacobian blocks.
      Eigen::MatrixXd DL = tp.dP.asDiagonal() * lsc_;
      Eigen::MatrixXd xx = lsc_.transpose() * DL;
      Eigen::MatrixXd mx = DL;
      mx.diagonal().array() -= 1.0;
      Eigen::MatrixXd J(2 * n, 2 * n);
      J.topLeftCorner(n, n) = xx.topLeftCorner(n, n);
      J.topRightCorner(n, n) = mx.topLeftCorner(n, n).transpose();
      J.bottomLeftCorner(n, n) = mx.topLeftCorner(n, n);
      J.bottomRightCorner(n, n) =
          Eigen::MatrixXd((1.0 + tp.dP.head(n).array()).matrix().asDiagonal());
      Eigen::VectorXd delta = J.partialPivLu().solve(-grad);
      if (!delta.allFinite()) break;
      double t = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls) {
        Eigen::VectorXd xc = x_, mc = mu_;
        xc.head(n) += t * delta.head(n);
        mc.head(n) += t * delta.tail(n);
        Eigen::VectorXd gnew(2 * n);
        const TiltParts tpn = eval_grad(xc, mc, gnew);
        const double gn = gnew.lpNorm<Eigen::Infinity>();
        if (gn < gnorm) {
          x_ = xc;
          mu_ = mc;
          grad = gnew;
          tp = tpn;
          gnorm = gn;
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved) break;
    }
    converged_ = ok || gnorm < 1e-6;
    if (!converged_) {
      x_.setZero();
      mu_.setZero();
    }
  }
  // psi* at the solution (or the valid zero-tilt bound if the solve failed).
  const TiltParts tp = tilt_parts(lsc_, us_, x_, mu_);
  psi_star_ = 0.0;
  for (int i = 0; i < d_; ++i) psi_star_ += tp.lp[i] + 0.5 * mu_[i] * mu_[i] - mu_[i] * x_[i];
  if (!converged_) psi_star_ = 0.0;
}

double TiltedSequentialSampler::propose(Eigen::VectorXd& eta, RngStream& rng) const {
  double p = 0.0;
  for (int i = 0; i < d_; ++i) {
    double c = 0.0;
    for (int j = 0; j < i; ++j) c += lsc_(i, j) * eta[j];
    const double tu = (us_[i] == kInf) ? kInf : us_[i] - mu_[i] - c;
    double z;
    if (tu == kInf) {
      z = rng.normal();
    } else {
      z = truncated_std_normal(-kInf, tu, rng);
      p += norm_log_cdf(tu);
    }
    eta[i] = mu_[i] + z;
    p += 0.5 * mu_[i] * mu_[i] - mu_[i] * eta[i];
  }
  return p;
}

Eigen::VectorXd TiltedSequentialSampler::sample(RngStream& rng, long max_trials) const {
  if (d_ == 0) return Eigen::VectorXd();
  if (psi_star_ < -700.0)
    throw std::runtime_error("sample_tmvn_upper: region probability is numerically zero");
  Eigen::VectorXd eta(d_);
  for (long trial = 1; trial <= max_trials; ++trial) {
    const double p = propose(eta, rng);
    if (std::log(rng.uniform()) <= p - psi_star_) {
      Eigen::VectorXd out(d_);
      for (int i = 0; i < d_; ++i) {
        double v = 0.0;
        for (int j = 0; j <= i; ++j) v += chol_(i, j) * eta[j];
        // Guard the bound against the last rounding error so downstream
        // constraint checks hold exactly.
        out[perm_[i]] = std::min(v, upper_[i]);
      }
      return out;
    }
  }
  throw std::runtime_error("sample_tmvn_upper: acceptance watchdog tripped");
}

RegionLogProb TiltedSequentialSampler::estimate_log_prob(int n_mc, RngStream& rng) const {
  if (d_ == 0) return {0.0, 0.0};
  if (n_mc < 2) throw std::invalid_argument("estimate_log_prob: n_mc must be >= 2");
  Eigen::VectorXd eta(d_);
  std::vector<double> logs(n_mc);
  double mx = -kInf;
  for (int k = 0; k < n_mc; ++k) {
    logs[k] = propose(eta, rng);
    mx = std::max(mx, logs[k]);
  }
  double s = 0.0, s2 = 0.0;
  for (double lp : logs) {
    const double e = std::exp(lp - mx);
    s += e;
    s2 += e * e;
  }
  const double mean = s / n_mc;
  const double var = std::max(0.0, s2 / n_mc - mean * mean);
  const double rel_se = std::sqrt(var / n_mc) / mean;
  return {mx + std::log(mean), rel_se};
}

TiltWarmStart TiltedSequentialSampler::warm_start() const {
  TiltWarmStart w;
  w.x.setZero(d_);
  w.mu.setZero(d_);
  for (int i = 0; i < d_; ++i) {
    w.x[perm_[i]] = x_[i];
    w.mu[perm_[i]] = mu_[i];
  }
  w.valid = converged_;
  return w;
}

Eigen::VectorXd sample_tmvn_upper(const TruncationSpec& spec, RngStream& rng) {
  return TiltedSequentialSampler(spec).sample(rng);
}

RegionLogProb mc_region_log_prob(const TruncationSpec& spec, int n_mc, RngStream& rng) {
  return TiltedSequentialSampler(spec).estimate_log_prob(n_mc, rng);
}

void TmvnGibbsKernel::reset(const Eigen::VectorXd& feasible) { state_ = feasible; }

Eigen::LLT<Eigen::MatrixXd> low_rank_capacitance(const Eigen::VectorXd& v_diag,
                                                 const Eigen::MatrixXd& b) {
  const int p = static_cast<int>(b.cols());
  Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(p, p) +
                        b.transpose() * v_diag.cwiseInverse().asDiagonal() * b;
  return Eigen::LLT<Eigen::MatrixXd>(cap);
}

Eigen::VectorXd low_rank_solve(const Eigen::VectorXd& v_diag, const Eigen::MatrixXd& b,
                               const Eigen::LLT<Eigen::MatrixXd>& cap_llt,
                               const Eigen::VectorXd& r) {
  const Eigen::VectorXd rv = r.cwiseQuotient(v_diag);
  return rv - v_diag.cwiseInverse().asDiagonal() * (b * cap_llt.solve(b.transpose() * rv));
}

const Eigen::VectorXd& TmvnGibbsKernel::step_low_rank(const Eigen::VectorXd& v_diag,
                                                      const Eigen::MatrixXd& b,
                                                      const Eigen::VectorXd& upper, int sweeps,
                                                      RngStream& rng) {
  const int d = static_cast<int>(upper.size());
  const int p = static_cast<int>(b.cols());
  if (state_.size() != d)
    throw std::logic_error("TmvnGibbsKernel: state not initialized to the spec dimension");
  for (int i = 0; i < d; ++i)
    if (!(state_[i] <= upper[i]))
      throw std::logic_error("TmvnGibbsKernel: infeasible warm-start state");

  // Q = V^{-1} - G G' with G = V^{-1} B chol(cap)^{-T}; maintain s = G' x.
  const Eigen::LLT<Eigen::MatrixXd> cap_llt = low_rank_capacitance(v_diag, b);
  Eigen::MatrixXd g = v_diag.cwiseInverse().asDiagonal() * b;
  cap_llt.matrixU().solveInPlace<Eigen::OnTheRight>(g);  // g <- g U^{-1}
  Eigen::VectorXd s = g.transpose() * state_;
  Eigen::VectorXd gi(p);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int i = 0; i < d; ++i) {
      gi = g.row(i).transpose();
      const double qii = 1.0 / v_diag[i] - gi.squaredNorm();
      const double qx_i = state_[i] / v_diag[i] - gi.dot(s);
      const double m = state_[i] - qx_i / qii;
      const double sd = 1.0 / std::sqrt(qii);
      const double ub = (upper[i] == kInf) ? kInf : (upper[i] - m) / sd;
      double xn = m + sd * truncated_std_normal(-kInf, ub, rng);
      if (upper[i] != kInf) xn = std::min(xn, upper[i]);
      const double diff = xn - state_[i];
      if (diff != 0.0) {
        s += gi * diff;
        state_[i] = xn;
      }
    }
  }
  return state_;
}

const Eigen::VectorXd& TmvnGibbsKernel::step(const TruncationSpec& spec, int sweeps,
                                             RngStream& rng) {
  const int d = static_cast<int>(spec.upper.size());
  if (state_.size() != d)
    throw std::logic_error("TmvnGibbsKernel: state not initialized to the spec dimension");
  for (int i = 0; i < d; ++i)
    if (!(state_[i] <= spec.upper[i]))
      throw std::logic_error("TmvnGibbsKernel: infeasible warm-start state");

  const Eigen::MatrixXd q = jittered(spec.sigma).llt().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd qx = q * state_;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int i = 0; i < d; ++i) {
      const double qii = q(i, i);
      const double m = state_[i] - qx[i] / qii;
      const double s = 1.0 / std::sqrt(qii);
      const double ub = (spec.upper[i] == kInf) ? kInf : (spec.upper[i] - m) / s;
      double xn = m + s * truncated_std_normal(-kInf, ub, rng);
      if (spec.upper[i] != kInf) xn = std::min(xn, spec.upper[i]);
      const double diff = xn - state_[i];
      if (diff != 0.0) {
        qx += q.col(i) * diff;
        state_[i] = xn;
      }
    }
  }
  return state_;
}

}  // namespace psun
