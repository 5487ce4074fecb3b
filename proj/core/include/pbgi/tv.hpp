#pragma once

// Isotropic total-variation stencils used by the reconstruction programs.
//
// Stacked form (strip-major vector x of length n*q): terms run over
// 1 <= i <= qn - n with i != kn, pairing the across-track difference
// x[i+1] - x[i] with the along-track difference x[i+n] - x[i]; the exclusion
// drops the would-be wrap-around terms at strip seams. Matrix form (X of
// shape n x q): terms run over 1 <= i <= n-1, 1 <= j <= q-1.
//
// With smoothing eps > 0, each magnitude sqrt(a^2 + b^2) becomes
// sqrt(a^2 + b^2 + eps^2) - eps, which is differentiable and still exactly
// zero on constants.

#include <Eigen/Dense>

#include "pbgi/errors.hpp"

namespace pbgi {

double tv_value_stacked(const Eigen::VectorXd& x, int n, int q, double eps = 0.0);
double tv_value_matrix(const Eigen::MatrixXd& x, double eps = 0.0);  // needs n >= 2, q >= 2

// Degenerate single-strip scan: across-track differences only (the missing
// along-track difference enters as zero).
double tv_value_single_strip(const Eigen::VectorXd& strip, double eps = 0.0);

// Gradients of the smoothed stencils; eps must be positive.
Eigen::VectorXd tv_gradient_stacked(const Eigen::VectorXd& x, int n, int q, double eps);
Eigen::MatrixXd tv_gradient_matrix(const Eigen::MatrixXd& x, double eps);
Eigen::VectorXd tv_gradient_single_strip(const Eigen::VectorXd& strip, double eps);

}  // namespace pbgi
