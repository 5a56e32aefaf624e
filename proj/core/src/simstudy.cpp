#include "psun/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "psun/diagnostics.hpp"
#include "psun/special.hpp"

namespace psun {

Eigen::MatrixXd wishart_sample(const Eigen::MatrixXd& target_mean, RngStream& rng) {
  const int p = static_cast<int>(target_mean.rows());
  if (target_mean.cols() != p) throw std::invalid_argument("wishart_sample: non-square target");
  const double df = p + 1.0;
  const Eigen::MatrixXd scale = target_mean / df;
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("wishart_sample: target mean is not positive definite");
  // Bartlett construction.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Eigen::MatrixXd la = llt.matrixL() * a;
  return la * la.transpose();
}

std::string combo_name(Link link, PriorFamily family) {
  std::string s = link == Link::kProbit ? "probit-" : "logit-";
  switch (family) {
    case PriorFamily::kGaussian: return s + "gaussian";
    case PriorFamily::kLaplaceIndep: return s + "laplace";
    case PriorFamily::kCauchy: return s + "cauchy";
    case PriorFamily::kDirichletLaplace: return s + "dl";
    case PriorFamily::kGaussianSage: return s + "gaussian-sage";
  }
  return s + "unknown";
}

StudyCombo make_combo(Link link, PriorFamily family) {
  StudyCombo c;
  c.link = link;
  c.family = family;
  c.name = combo_name(link, family);
  return c;
}

std::vector<StudyCombo> default_combos() {
  return {
      make_combo(Link::kLogit, PriorFamily::kGaussian),
      make_combo(Link::kLogit, PriorFamily::kLaplaceIndep),
      make_combo(Link::kLogit, PriorFamily::kDirichletLaplace),
      make_combo(Link::kProbit, PriorFamily::kLaplaceIndep),
      make_combo(Link::kProbit, PriorFamily::kDirichletLaplace),
  };
}

std::vector<double> StudyConfig::default_levels() {
  std::vector<double> lv(19);
  for (int j = 1; j <= 19; ++j) lv[j - 1] = 0.05 * j;
  return lv;
}

namespace {

// Draw the prior scale matrix for one (rep, combo) per the study rules.
Eigen::MatrixXd draw_prior_omega(const StudyCombo& combo, int p, RngStream& rng) {
  if (combo.family == PriorFamily::kDirichletLaplace) {
    return Eigen::MatrixXd::Identity(p, p);
  }
  Eigen::MatrixXd target;
  if (combo.omega_override.size() > 0) {
    target = combo.omega_override;
  } else {
    target = prior_from_recipe(combo.link, combo.family, p).omega;
  }
  Eigen::MatrixXd w = wishart_sample(target, rng);
  if (combo.family != PriorFamily::kGaussian && combo.family != PriorFamily::kGaussianSage) {
    w = Eigen::MatrixXd(w.diagonal().asDiagonal());
  }
  return w;
}

Eigen::VectorXd draw_beta_true(const PriorSpec& prior, int p, RngStream& rng) {
  const Eigen::VectorXd w = sample_prior(prior.w_law(p), rng);
  Eigen::VectorXd n(p);
  for (int j = 0; j < p; ++j) n[j] = rng.normal();
  const Eigen::VectorXd diag = prior.omega.diagonal();
  bool diagonal = true;
  for (int i = 0; i < p && diagonal; ++i)
    for (int j = 0; j < p && diagonal; ++j)
      if (i != j && prior.omega(i, j) != 0.0) diagonal = false;
  if (diagonal) {
    return (w.cwiseProduct(diag)).cwiseSqrt().cwiseProduct(n);
  }
  // Full scale matrix only with the Gaussian family (w = 1).
  const Eigen::LLT<Eigen::MatrixXd> llt(prior.omega);
  return llt.matrixL() * n;
}

struct RepResult {
  // [combo][level]: intercept hit (0/1) and mean of the other coefficients.
  std::vector<std::vector<double>> intercept;
  std::vector<std::vector<double>> others;
  std::vector<bool> ok;
};

RepResult run_rep(const StudyConfig& cfg, int rep) {
  const int p = cfg.p, n = cfg.n;
  const int n_levels = static_cast<int>(cfg.levels.size());
  RepResult res;
  res.intercept.assign(cfg.combos.size(), std::vector<double>(n_levels, 0.0));
  res.others.assign(cfg.combos.size(), std::vector<double>(n_levels, 0.0));
  res.ok.assign(cfg.combos.size(), false);

  RngStream rng = RngStream::child(cfg.seed, static_cast<std::uint64_t>(rep));

  // Simulated design: intercept column plus N(0,1) covariates rescaled to
  // standard deviation 0.5.
  Eigen::MatrixXd x(n, p);
  x.col(0).setOnes();
  Eigen::MatrixXd raw(n, p - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p - 1; ++j) raw(i, j) = rng.normal();
  x.rightCols(p - 1) = rescale_sd_half(raw);

  for (std::size_t h = 0; h < cfg.combos.size(); ++h) {
    const StudyCombo& combo = cfg.combos[h];
    try {
      PriorSpec prior;
      prior.family = combo.family;
      prior.omega = draw_prior_omega(combo, p, rng);
      prior.xi = Eigen::VectorXd::Zero(p);

      const Eigen::VectorXd beta_true = draw_beta_true(prior, p, rng);

      BinaryDesign design;
      design.x = x;
      design.link = combo.link;
      design.y.resize(n);
      for (int i = 0; i < n; ++i) {
        const double eta = x.row(i).dot(beta_true);
        const double pr = combo.link == Link::kProbit ? norm_cdf(eta) : logistic_cdf(eta);
        design.y[i] = rng.uniform() < pr ? 1 : 0;
      }
      for (int j = 0; j < p; ++j) design.names.push_back("beta_" + std::to_string(j + 1));

      FitConfig fit;
      fit.iters = cfg.gibbs_iters;
      fit.burnin = cfg.burnin;
      fit.thin = 1;
      fit.chains = 1;
      fit.seed = mix_seed(cfg.seed) ^ mix_seed(static_cast<std::uint64_t>(rep) * 131 + h + 7);
      fit.gibbs = cfg.gibbs;
      const DrawMatrix draws = fit_gibbs(design, prior, fit);

      for (int j = 0; j < p; ++j) {
        const Eigen::VectorXd col = draws.draws.col(j);
        std::vector<double> vals(col.data(), col.data() + col.size());
        std::sort(vals.begin(), vals.end());
        for (int l = 0; l < n_levels; ++l) {
          // quantile_type7 on pre-sorted values
          const double hq = (vals.size() - 1) * cfg.levels[l];
          const std::size_t lo = static_cast<std::size_t>(hq);
          const std::size_t hi = std::min(lo + 1, vals.size() - 1);
          const double q = vals[lo] + (hq - lo) * (vals[hi] - vals[lo]);
          const double hit = beta_true[j] <= q ? 1.0 : 0.0;
          if (j == 0) {
            res.intercept[h][l] = hit;
          } else {
            res.others[h][l] += hit / (p - 1);
          }
        }
      }
      res.ok[h] = true;
    } catch (const std::exception&) {
      res.ok[h] = false;
    }
  }
  return res;
}

}  // namespace

CoverageTable run_study(const StudyConfig& cfg) {
  if (cfg.g_reps < 1 || cfg.n < 1 || cfg.p < 2)
    throw std::invalid_argument("run_study: invalid config");
  for (std::size_t i = 1; i < cfg.levels.size(); ++i)
    if (!(cfg.levels[i] > cfg.levels[i - 1]))
      throw std::invalid_argument("run_study: levels must be strictly increasing");
  if (!cfg.levels.empty() && !(cfg.levels.front() > 0.0 && cfg.levels.back() < 1.0))
    throw std::invalid_argument("run_study: levels must lie in (0,1)");

  std::vector<RepResult> results(cfg.g_reps);
  const int hw = cfg.max_threads > 0 ? cfg.max_threads
                                     : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= cfg.g_reps) return;
      results[r] = run_rep(cfg, r);
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(hw, cfg.g_reps);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  CoverageTable table;
  table.levels = cfg.levels;
  table.reps_total = cfg.g_reps;
  const int n_levels = static_cast<int>(cfg.levels.size());
  for (std::size_t h = 0; h < cfg.combos.size(); ++h) {
    CoverageRow ri, ro;
    ri.combo = ro.combo = cfg.combos[h].name;
    ri.group = "intercept";
    ro.group = "others";
    ri.coverage.assign(n_levels, 0.0);
    ro.coverage.assign(n_levels, 0.0);
    int used = 0;
    for (int r = 0; r < cfg.g_reps; ++r) {
      if (!results[r].ok[h]) continue;
      ++used;
      for (int l = 0; l < n_levels; ++l) {
        ri.coverage[l] += results[r].intercept[h][l];
        ro.coverage[l] += results[r].others[h][l];
      }
    }
    table.failures += cfg.g_reps - used;
    ri.reps_used = ro.reps_used = used;
    for (int l = 0; l < n_levels; ++l) {
      if (used > 0) {
        ri.coverage[l] /= used;
        ro.coverage[l] /= used;
      }
      const double c = ri.coverage[l];
      ri.std_err.push_back(used > 0 ? std::sqrt(c * (1.0 - c) / used) : 0.0);
      const double co = ro.coverage[l];
      ro.std_err.push_back(used > 0 ? std::sqrt(co * (1.0 - co) / used) : 0.0);
    }
    table.rows.push_back(std::move(ri));
    table.rows.push_back(std::move(ro));
  }
  return table;
}

}  // namespace psun
