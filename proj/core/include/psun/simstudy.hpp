#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "psun/regression.hpp"

namespace psun {

// Wishart draw with df = p + 1 (the smallest integer giving a density) and
// scale target_mean / (p + 1), so the expectation equals target_mean.
Eigen::MatrixXd wishart_sample(const Eigen::MatrixXd& target_mean, RngStream& rng);

struct StudyCombo {
  Link link = Link::kLogit;
  PriorFamily family = PriorFamily::kGaussian;
  std::string name;
  Eigen::MatrixXd omega_override;  // used instead of the recipe when nonempty
};

// The five tabulated model/prior combinations.
std::vector<StudyCombo> default_combos();

StudyCombo make_combo(Link link, PriorFamily family);

struct StudyConfig {
  int g_reps = 10000;  // desk-scale runs use 500
  int n = 25;
  int p = 10;
  std::vector<StudyCombo> combos = default_combos();
  long gibbs_iters = 10000;
  long burnin = 1000;
  std::vector<double> levels = default_levels();
  std::uint64_t seed = 1;
  GibbsConfig gibbs;
  int max_threads = 0;

  static std::vector<double> default_levels();  // {0.05 j : j = 1..19}
};

struct CoverageRow {
  std::string combo;
  std::string group;  // "intercept" or "others"
  std::vector<double> coverage;
  std::vector<double> std_err;  // binomial
  int reps_used = 0;
};

struct CoverageTable {
  std::vector<double> levels;
  std::vector<CoverageRow> rows;
  int failures = 0;
  int reps_total = 0;
};

// Frequentist-coverage study: per rep, simulate a design, draw the prior
// scale, draw the true coefficients from the fitted prior, simulate the
// response, fit with the same prior, and compare one-sided empirical
// quantiles with the truth. Reps run in parallel on independent streams.
CoverageTable run_study(const StudyConfig& config);

}  // namespace psun
