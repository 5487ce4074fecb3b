#include "pbgi/tv.hpp"

#include <cmath>
#include <string>

namespace pbgi {

namespace {

void check_stacked(const Eigen::VectorXd& x, int n, int q) {
  if (n < 2 || q < 1) {
    throw DimensionError("stacked TV needs n >= 2 and q >= 1, got n=" + std::to_string(n) +
                         " q=" + std::to_string(q));
  }
  if (x.size() != static_cast<Eigen::Index>(n) * q) {
    throw DimensionError("stacked vector length " + std::to_string(x.size()) +
                         " does not equal n*q = " + std::to_string(n * q));
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0)) {
    throw UnsupportedConfigError("smoothed TV gradient needs eps > 0 (got eps=" +
                                 std::to_string(eps) + "; eps = 0 is the subgradient regime)");
  }
}

inline double magnitude(double a, double b, double eps) {
  return std::sqrt(a * a + b * b + eps * eps) - eps;
}

}  // namespace

double tv_value_stacked(const Eigen::VectorXd& x, int n, int q, double eps) {
  check_stacked(x, n, q);
  double total = 0.0;
  // 0-based p = i - 1; skip p where (p + 1) % n == 0 (strip seams).
  const Eigen::Index limit = static_cast<Eigen::Index>(q) * n - n;
  for (Eigen::Index p = 0; p < limit; ++p) {
    if ((p + 1) % n == 0) continue;
    total += magnitude(x[p + 1] - x[p], x[p + n] - x[p], eps);
  }
  return total;
}

double tv_value_matrix(const Eigen::MatrixXd& x, double eps) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  if (n < 2 || q < 2) {
    throw DimensionError("matrix TV needs at least 2x2, got " + std::to_string(n) + "x" +
                         std::to_string(q));
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j + 1 < q; ++j) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      total += magnitude(x(i + 1, j) - x(i, j), x(i, j + 1) - x(i, j), eps);
    }
  }
  return total;
}

double tv_value_single_strip(const Eigen::VectorXd& strip, double eps) {
  if (strip.size() < 2) {
    throw DimensionError("single-strip TV needs at least 2 pixels");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < strip.size(); ++i) {
    total += magnitude(strip[i + 1] - strip[i], 0.0, eps);
  }
  return total;
}

Eigen::VectorXd tv_gradient_stacked(const Eigen::VectorXd& x, int n, int q, double eps) {
  check_stacked(x, n, q);
  check_eps(eps);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  const Eigen::Index limit = static_cast<Eigen::Index>(q) * n - n;
  for (Eigen::Index p = 0; p < limit; ++p) {
    if ((p + 1) % n == 0) continue;
    const double a = x[p + 1] - x[p];
    const double b = x[p + n] - x[p];
    const double s = std::sqrt(a * a + b * b + eps * eps);
    grad[p] -= (a + b) / s;
    grad[p + 1] += a / s;
    grad[p + n] += b / s;
  }
  return grad;
}

Eigen::MatrixXd tv_gradient_matrix(const Eigen::MatrixXd& x, double eps) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  if (n < 2 || q < 2) {
    throw DimensionError("matrix TV needs at least 2x2, got " + std::to_string(n) + "x" +
                         std::to_string(q));
  }
  check_eps(eps);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, q);
  for (Eigen::Index j = 0; j + 1 < q; ++j) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double a = x(i + 1, j) - x(i, j);
      const double b = x(i, j + 1) - x(i, j);
      const double s = std::sqrt(a * a + b * b + eps * eps);
      grad(i, j) -= (a + b) / s;
      grad(i + 1, j) += a / s;
      grad(i, j + 1) += b / s;
    }
  }
  return grad;
}

Eigen::VectorXd tv_gradient_single_strip(const Eigen::VectorXd& strip, double eps) {
  if (strip.size() < 2) {
    throw DimensionError("single-strip TV needs at least 2 pixels");
  }
  check_eps(eps);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(strip.size());
  for (Eigen::Index i = 0; i + 1 < strip.size(); ++i) {
    const double a = strip[i + 1] - strip[i];
    const double s = std::sqrt(a * a + eps * eps);
    grad[i] -= a / s;
    grad[i + 1] += a / s;
  }
  return grad;
}

}  // namespace pbgi
