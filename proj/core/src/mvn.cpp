#include "psun/mvn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psun/quadrature.hpp"
#include "psun/special.hpp"

namespace psun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_diagonal(const Eigen::MatrixXd& s) {
  const double scale = s.diagonal().cwiseAbs().maxCoeff();
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j)
      if (i != j && std::abs(s(i, j)) > 1e-14 * scale) return false;
  return true;
}

double clamp_corr(double r) {
  const double lim = 1.0 - 1e-12;
  return r > lim ? lim : (r < -lim ? -lim : r);
}

// Correlation-form recursion. u holds standardized bounds, r the correlation
// matrix. Integrates out the last variable and conditions the rest on it.
double cdf_standardized(std::vector<double> u, Eigen::MatrixXd r) {
  const int k = static_cast<int>(u.size());
  if (k == 0) return 1.0;
  if (k == 1) return norm_cdf(u[0]);

  const int last = k - 1;
  const double ub = std::min(u[last], 8.5);
  if (ub <= -39.0) return 0.0;

  auto conditional = [&](double z) {
    std::vector<double> uc(last);
    Eigen::MatrixXd rc(last, last);
    for (int i = 0; i < last; ++i) {
      const double ri = clamp_corr(r(i, last));
      const double si = std::sqrt(1.0 - ri * ri);
      uc[i] = (u[i] == kInf) ? kInf : (u[i] - ri * z) / si;
      for (int j = 0; j < last; ++j) {
        const double rj = clamp_corr(r(j, last));
        const double sj = std::sqrt(1.0 - rj * rj);
        rc(i, j) = (i == j) ? 1.0 : clamp_corr((r(i, j) - ri * rj) / (si * sj));
      }
    }
    return cdf_standardized(std::move(uc), std::move(rc));
  };

  const double lo = -39.0;
  return integrate_adaptive(
      [&](double z) { return norm_pdf(z) * conditional(z); }, lo, ub, 1e-13);
}

}  // namespace

double mvn_cdf_upper(const Eigen::VectorXd& upper, const Eigen::MatrixXd& sigma) {
  const int m = static_cast<int>(upper.size());
  if (sigma.rows() != m || sigma.cols() != m)
    throw std::invalid_argument("mvn_cdf_upper: dimension mismatch");
  if (m == 0) return 1.0;

  // Drop components with infinite bounds.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i)
    if (upper[i] != kInf) keep.push_back(i);
  const int k = static_cast<int>(keep.size());
  if (k == 0) return 1.0;

  std::vector<double> u(k);
  Eigen::MatrixXd r(k, k);
  for (int i = 0; i < k; ++i) {
    const double si = std::sqrt(sigma(keep[i], keep[i]));
    if (!(si > 0.0)) throw std::invalid_argument("mvn_cdf_upper: zero variance component");
    u[i] = upper[keep[i]] / si;
    for (int j = 0; j < k; ++j) {
      const double sj = std::sqrt(sigma(keep[j], keep[j]));
      r(i, j) = (i == j) ? 1.0 : clamp_corr(sigma(keep[i], keep[j]) / (si * sj));
    }
  }

  if (is_diagonal(r)) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= norm_cdf(u[i]);
    return p;
  }
  if (k > 3)
    throw std::invalid_argument("mvn_cdf_upper: non-diagonal sigma supported only up to dimension 3");
  return cdf_standardized(std::move(u), std::move(r));
}

double mvn_log_cdf_upper(const Eigen::VectorXd& upper, const Eigen::MatrixXd& sigma) {
  const int m = static_cast<int>(upper.size());
  if (m >= 1 && sigma.rows() == m) {
    // Diagonal case in log space directly, to survive far tails.
    bool diag_ok = true;
    for (int i = 0; i < m && diag_ok; ++i)
      for (int j = i + 1; j < m && diag_ok; ++j)
        if (std::abs(sigma(i, j)) > 1e-14 * sigma.diagonal().cwiseAbs().maxCoeff()) diag_ok = false;
    if (diag_ok) {
      double lp = 0.0;
      for (int i = 0; i < m; ++i) {
        if (upper[i] == kInf) continue;
        lp += norm_log_cdf(upper[i] / std::sqrt(sigma(i, i)));
      }
      return lp;
    }
  }
  return std::log(mvn_cdf_upper(upper, sigma));
}

}  // namespace psun
