#include "pbgi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace pbgi {

double mse(const Scene& reference, const Scene& estimate) {
  if (reference.n() != estimate.n() || reference.q() != estimate.q()) {
    throw DimensionError("scene shapes differ: " + std::to_string(reference.n()) + "x" +
                         std::to_string(reference.q()) + " vs " + std::to_string(estimate.n()) +
                         "x" + std::to_string(estimate.q()));
  }
  const double peak = reference.peak();
  const Eigen::MatrixXd diff = (reference.data - estimate.data) * peak;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

QualityReport psnr(const Scene& reference, const Scene& estimate) {
  QualityReport report;
  report.bit_depth = reference.bit_depth;
  report.mse = mse(reference, estimate);
  if (report.mse == 0.0) {
    report.psnr_infinite = true;
    report.psnr_db = std::numeric_limits<double>::infinity();
    return report;
  }
  const double peak = reference.peak();
  report.psnr_db = 10.0 * std::log10(peak * peak / report.mse);
  return report;
}

CurveFit fit_psnr_curve(const std::vector<std::pair<double, double>>& points, int degree) {
  if (degree < 0) {
    throw FitError("fit degree must be >= 0");
  }
  std::set<double> distinct;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw FitError("fit points must be finite");
    }
    distinct.insert(x);
  }
  if (static_cast<int>(distinct.size()) < degree + 1) {
    throw FitError("need at least " + std::to_string(degree + 1) + " distinct abscissae, got " +
                   std::to_string(distinct.size()));
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd vandermonde(rows, degree + 1);
  Eigen::VectorXd values(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double power = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vandermonde(r, c) = power;
      power *= points[static_cast<std::size_t>(r)].first;
    }
    values(r) = points[static_cast<std::size_t>(r)].second;
  }

  CurveFit fit;
  fit.degree = degree;
  fit.coefficients = vandermonde.colPivHouseholderQr().solve(values);
  fit.residuals = values - vandermonde * fit.coefficients;
  return fit;
}

}  // namespace pbgi
