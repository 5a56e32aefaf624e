#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "psun/psun.hpp"

namespace psun {

// Biased-normalized autocorrelation estimates, lags 0..max_lag (lag 0 = 1).
Eigen::VectorXd acf(const Eigen::VectorXd& draws, int max_lag);

// Effective sample size via Geyer's initial positive sequence, clipped to N.
double ess(const Eigen::VectorXd& draws);

// Type-7 quantile (linear interpolation of order statistics).
double quantile_type7(std::vector<double> values, double level);

struct CoefficientSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> quantiles;
  double ess = 0.0;
  double mcse = 0.0;            // sd / sqrt(ess)
  std::vector<double> acf;      // lags 1..k
};

struct ChainSummary {
  std::vector<double> levels;
  std::vector<CoefficientSummary> coefficients;
};

ChainSummary summarize(const DrawMatrix& draws,
                       const std::vector<double>& levels = {0.05, 0.25, 0.5, 0.75, 0.95},
                       int acf_lags = 50);

}  // namespace psun
