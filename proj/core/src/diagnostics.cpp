#include "psun/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psun {

namespace {

double autocovariance(const Eigen::VectorXd& x, double mean, int lag) {
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
  return s / n;  // biased normalization
}

}  // namespace

Eigen::VectorXd acf(const Eigen::VectorXd& draws, int max_lag) {
  const int n = static_cast<int>(draws.size());
  if (n <= max_lag) throw std::invalid_argument("acf: series shorter than max_lag");
  const double mean = draws.mean();
  const double c0 = autocovariance(draws, mean, 0);
  if (!(c0 > 0.0)) throw std::invalid_argument("acf: constant series");
  Eigen::VectorXd out(max_lag + 1);
  out[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) out[k] = autocovariance(draws, mean, k) / c0;
  return out;
}

double ess(const Eigen::VectorXd& draws) {
  const int n = static_cast<int>(draws.size());
  if (n < 100) throw std::invalid_argument("ess: need at least 100 draws");
  const double mean = draws.mean();
  const double c0 = autocovariance(draws, mean, 0);
  if (!(c0 > 0.0)) throw std::invalid_argument("ess: constant series");
  // Geyer initial positive sequence: accumulate paired autocorrelations
  // until a pair goes nonpositive.
  double tau = 1.0;
  const int max_lag = n / 2;
  for (int k = 1; k + 1 <= max_lag; k += 2) {
    const double pair = (autocovariance(draws, mean, k) + autocovariance(draws, mean, k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1e-12);
  return std::min(static_cast<double>(n), n / tau);
}

double quantile_type7(std::vector<double> values, double level) {
  if (values.empty()) throw std::invalid_argument("quantile_type7: empty input");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("quantile_type7: level in [0,1]");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 1) return values[0];
  const double h = (n - 1) * level;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - lo;
  return values[lo] + frac * (values[hi] - values[lo]);
}

ChainSummary summarize(const DrawMatrix& draws, const std::vector<double>& levels, int acf_lags) {
  const int n = static_cast<int>(draws.draws.rows());
  const int p = static_cast<int>(draws.draws.cols());
  if (n == 0) throw std::invalid_argument("summarize: no draws");
  ChainSummary cs;
  cs.levels = levels;
  cs.coefficients.resize(p);
  for (int j = 0; j < p; ++j) {
    CoefficientSummary& c = cs.coefficients[j];
    c.name = (j < static_cast<int>(draws.names.size())) ? draws.names[j]
                                                        : "beta_" + std::to_string(j + 1);
    const Eigen::VectorXd col = draws.draws.col(j);
    c.mean = col.mean();
    c.sd = std::sqrt((col.array() - c.mean).square().sum() / std::max(1, n - 1));
    std::vector<double> vals(col.data(), col.data() + n);
    for (double lv : levels) c.quantiles.push_back(quantile_type7(vals, lv));
    const bool constant = c.sd == 0.0;
    if (!constant && n >= 100) {
      c.ess = ess(col);
      const int lags = std::min(acf_lags, n - 1);
      const Eigen::VectorXd a = acf(col, lags);
      c.acf.assign(a.data() + 1, a.data() + lags + 1);
    } else {
      c.ess = constant ? static_cast<double>(n) : static_cast<double>(n);
      c.acf.assign(std::min(acf_lags, std::max(0, n - 1)), 0.0);
    }
    c.mcse = c.ess > 0 ? c.sd / std::sqrt(c.ess) : 0.0;
  }
  return cs;
}

}  // namespace psun
