#include "psun/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "psun/special.hpp"

namespace psun {

Eigen::VectorXd BinaryDesign::signs() const {
  Eigen::VectorXd s(y.size());
  for (int i = 0; i < y.size(); ++i) s[i] = 2.0 * y[i] - 1.0;
  return s;
}

void BinaryDesign::validate(bool allow_constant_columns) const {
  if (x.rows() != y.size()) throw std::invalid_argument("BinaryDesign: x and y row mismatch");
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("BinaryDesign: empty design");
  for (int i = 0; i < y.size(); ++i)
    if (y[i] != 0 && y[i] != 1) throw std::invalid_argument("BinaryDesign: response must be 0/1");
  if (!x.allFinite()) throw std::invalid_argument("BinaryDesign: non-finite design entries");
  if (allow_constant_columns) return;
  for (int j = 1; j < x.cols(); ++j) {
    if ((x.col(j).maxCoeff() - x.col(j).minCoeff()) == 0.0)
      throw std::invalid_argument("BinaryDesign: constant non-intercept column " +
                                  std::to_string(j));
  }
}

void PriorSpec::validate(int p) const {
  if (omega.rows() != p || omega.cols() != p)
    throw std::invalid_argument("PriorSpec: omega must be p x p");
  if (xi.size() != 0 && xi.size() != p)
    throw std::invalid_argument("PriorSpec: xi must have length p");
  if (m != 0)
    throw std::invalid_argument(
        "PriorSpec: latent prior dimension m > 0 is not wired through PriorSpec; build "
        "PsunParams directly for conditioned priors");
  if (family == PriorFamily::kDirichletLaplace) {
    if (!omega.isApprox(Eigen::MatrixXd::Identity(p, p), 1e-12))
      throw std::invalid_argument("PriorSpec: dirichlet-laplace requires omega = I");
  }
  if (family != PriorFamily::kGaussian && family != PriorFamily::kGaussianSage) {
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (i != j && omega(i, j) != 0.0)
          throw std::invalid_argument("PriorSpec: non-diagonal omega only with the Gaussian family");
  }
}

MixingLaw PriorSpec::w_law(int p) const {
  switch (family) {
    case PriorFamily::kGaussian:
    case PriorFamily::kGaussianSage:
      return MixingLaw::point_mass(1.0, p);
    case PriorFamily::kLaplaceIndep:
      return MixingLaw::exponential(0.5, p);
    case PriorFamily::kCauchy:
      return MixingLaw::inverse_gamma(0.5, 0.5, p);
    case PriorFamily::kDirichletLaplace:
      return MixingLaw::dirichlet_laplace(dl_grid, p);
  }
  throw std::logic_error("PriorSpec::w_law: unreachable");
}

PriorSpec prior_from_recipe(Link link, PriorFamily family, int p) {
  if (p < 1) throw std::invalid_argument("prior_from_recipe: p must be >= 1");
  PriorSpec spec;
  spec.family = family;
  spec.xi = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd diag(p);
  switch (family) {
    case PriorFamily::kGaussian:
      diag.setConstant(link == Link::kProbit ? 42.25 : 25.0);
      diag[0] = link == Link::kProbit ? 100.0 : 256.0;
      break;
    case PriorFamily::kLaplaceIndep:
      diag.setConstant(link == Link::kProbit ? 6.25 : 14.0625);
      diag[0] = link == Link::kProbit ? 100.0 : 210.25;
      break;
    case PriorFamily::kGaussianSage:
      diag.setConstant(16.0);
      break;
    case PriorFamily::kDirichletLaplace:
      diag.setConstant(1.0);
      break;
    case PriorFamily::kCauchy:
      throw std::invalid_argument(
          "prior_from_recipe: no published omega values for the Cauchy family; supply them "
          "explicitly");
  }
  spec.omega = diag.asDiagonal();
  return spec;
}

double log_likelihood(const BinaryDesign& design, const Eigen::VectorXd& beta) {
  if (beta.size() != design.p()) throw std::invalid_argument("log_likelihood: beta length mismatch");
  const Eigen::VectorXd eta = design.signs().cwiseProduct(design.x * beta);
  double ll = 0.0;
  for (int i = 0; i < eta.size(); ++i)
    ll += design.link == Link::kProbit ? norm_log_cdf(eta[i]) : logistic_log_cdf(eta[i]);
  return ll;
}

PosteriorPsun build_posterior(const BinaryDesign& design, const PriorSpec& prior) {
  design.validate();
  const int n = design.n(), p = design.p();
  prior.validate(p);

  PsunParams params;
  params.d = p;
  params.m = n;  // prior.m == 0 throughout
  params.q_w = prior.w_law(p);
  params.omega = prior.omega;
  params.xi = prior.xi.size() == p ? prior.xi : Eigen::VectorXd::Zero(p);

  const Eigen::VectorXd s = design.signs();
  const Eigen::VectorXd omega_diag_sqrt = prior.omega.diagonal().cwiseSqrt();
  // A* = B_y X diag^{1/2}(Omega), acting on z = diag^{-1/2}(Omega)(beta - xi).
  params.a_mat = s.asDiagonal() * design.x * omega_diag_sqrt.asDiagonal();
  params.b_vec = s.cwiseProduct(design.x * params.xi);
  params.theta = Eigen::MatrixXd::Identity(n, n);
  params.q_v.push_back(design.link == Link::kProbit ? MixingLaw::point_mass(1.0, n)
                                                    : MixingLaw::logistic_kolmogorov(n));
  return PosteriorPsun{PsunDistribution(std::move(params)), design};
}

DrawMatrix fit_gibbs(const BinaryDesign& design, const PriorSpec& prior, const FitConfig& cfg) {
  PosteriorPsun post = build_posterior(design, prior);
  ChainConfig ccfg;
  ccfg.iters = cfg.iters;
  ccfg.burnin = cfg.burnin;
  ccfg.thin = cfg.thin;
  ccfg.seed = cfg.seed;
  ccfg.store_traces = cfg.store_traces;
  ccfg.gibbs = cfg.gibbs;
  DrawMatrix dm = sample_chains(post.dist, ccfg, cfg.chains, cfg.max_threads);
  dm.names = design.names;
  return dm;
}

DrawMatrix fit_exact_iid(const BinaryDesign& design, const ExactPriorSpec& prior, long n_draws,
                         RngStream& rng) {
  design.validate(/*allow_constant_columns=*/true);
  if (n_draws < 1) throw std::invalid_argument("fit_exact_iid: n_draws must be >= 1");
  if (!(prior.scale > 0.0)) throw std::invalid_argument("fit_exact_iid: scale must be > 0");
  const int n = design.n(), p = design.p();
  const Eigen::MatrixXd xxt = design.x * design.x.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xxt);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e10)
    throw std::invalid_argument("fit_exact_iid: X X' is singular beyond the conditioning threshold");
  const Eigen::MatrixXd map = design.x.transpose() * xxt.llt().solve(Eigen::MatrixXd::Identity(n, n));

  const Eigen::VectorXd s = design.signs();
  DrawMatrix out;
  out.seed = 0;
  out.names = design.names;
  out.draws.resize(n_draws, p);
  out.chain.assign(static_cast<std::size_t>(n_draws), 0);
  Eigen::VectorXd u2(n);
  for (long r = 0; r < n_draws; ++r) {
    for (int i = 0; i < n; ++i) {
      const double h = prior.g2_star == ComponentPrior::kLogistic
                           ? prior.scale * logistic_quantile(rng.uniform())
                           : prior.scale * rng.normal();
      const double k = design.link == Link::kProbit ? rng.normal()
                                                    : logistic_quantile(rng.uniform());
      u2[i] = (k <= s[i] * h) ? h : -h;
    }
    out.draws.row(r) = (map * u2).transpose();
  }
  return out;
}

LogProbEstimate log_marginal_likelihood(const BinaryDesign& design, const PriorSpec& prior,
                                        int n_mc, RngStream& rng) {
  PosteriorPsun post = build_posterior(design, prior);
  return post.dist.psi(n_mc, rng);
}

std::pair<Eigen::MatrixXd, StandardizeRecord> standardize(const Eigen::MatrixXd& x_raw,
                                                          bool add_intercept) {
  const int n = static_cast<int>(x_raw.rows());
  const int p = static_cast<int>(x_raw.cols());
  if (n < 2) throw std::invalid_argument("standardize: need at least two rows");
  StandardizeRecord rec;
  rec.means.resize(p);
  rec.scales.resize(p);
  rec.intercept = add_intercept;
  Eigen::MatrixXd out(n, p + (add_intercept ? 1 : 0));
  if (add_intercept) out.col(0).setOnes();
  for (int j = 0; j < p; ++j) {
    const double mean = x_raw.col(j).mean();
    const double sd = std::sqrt((x_raw.col(j).array() - mean).square().sum() / (n - 1));
    if (!(sd > 0.0)) throw std::invalid_argument("standardize: constant column " + std::to_string(j));
    rec.means[j] = mean;
    rec.scales[j] = 0.5 / sd;
    out.col(j + (add_intercept ? 1 : 0)) = (x_raw.col(j).array() - mean) * rec.scales[j];
  }
  return {out, rec};
}

Eigen::MatrixXd rescale_sd_half(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd out = x;
  for (int j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().sum() / (n - 1));
    if (!(sd > 0.0)) throw std::invalid_argument("rescale_sd_half: constant column");
    out.col(j) *= 0.5 / sd;
  }
  return out;
}

double predict_prob(const Eigen::VectorXd& x_new, Link link, const DrawMatrix& draws) {
  if (x_new.size() != draws.draws.cols())
    throw std::invalid_argument("predict_prob: dimension mismatch");
  const Eigen::VectorXd eta = draws.draws * x_new;
  double acc = 0.0;
  for (int i = 0; i < eta.size(); ++i)
    acc += link == Link::kProbit ? norm_cdf(eta[i]) : logistic_cdf(eta[i]);
  return acc / eta.size();
}

}  // namespace psun
