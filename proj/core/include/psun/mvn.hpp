#pragma once

#include <Eigen/Dense>

namespace psun {

// P(X <= upper) for X ~ N(0, sigma), computed deterministically.
//
// Handles any dimension when sigma is diagonal (product of univariate
// probabilities); otherwise dimension at most 3, by recursive conditioning
// with adaptive quadrature. Components with an infinite upper bound are
// dropped. Intended for density evaluation and for test oracles; large
// non-diagonal problems go through the Monte Carlo estimator in tmvn.hpp.
double mvn_cdf_upper(const Eigen::VectorXd& upper, const Eigen::MatrixXd& sigma);

double mvn_log_cdf_upper(const Eigen::VectorXd& upper, const Eigen::MatrixXd& sigma);

}  // namespace psun
