#pragma once

// Image quality scoring. MSE is computed in integer-scale units (both images
// multiplied by 2^bit_depth - 1 before squaring) so PSNR values line up with
// the usual image-processing convention; the reference scene's bit depth is
// used for both.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pbgi/errors.hpp"
#include "pbgi/scene.hpp"

namespace pbgi {

struct QualityReport {
  double mse = 0.0;
  double psnr_db = 0.0;       // meaningless when psnr_infinite
  bool psnr_infinite = false; // set when mse == 0
  int bit_depth = 8;
};

double mse(const Scene& reference, const Scene& estimate);

// PSNR = 10 log10(peak^2 / MSE) with peak = 2^bit_depth - 1.
QualityReport psnr(const Scene& reference, const Scene& estimate);

struct CurveFit {
  Eigen::VectorXd coefficients;  // ascending powers, degree + 1 entries
  Eigen::VectorXd residuals;     // per input point
  int degree = 2;
};

// Least-squares polynomial fit of quality-vs-sampling-rate points, for
// reporting only. Needs at least degree + 1 distinct abscissae.
CurveFit fit_psnr_curve(const std::vector<std::pair<double, double>>& points, int degree = 2);

}  // namespace pbgi
