#include "pbgi/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "pbgi/tv.hpp"

namespace pbgi {

void SolverConfig::validate() const {
  if (lambda && (!std::isfinite(*lambda) || *lambda < 0.0)) {
    throw DomainError("lambda must be finite and >= 0");
  }
  if (max_iters < 1) {
    throw DomainError("max_iters must be >= 1");
  }
  if (!std::isfinite(rel_tol) || rel_tol < 0.0) {
    throw DomainError("rel_tol must be finite and >= 0");
  }
  if (!std::isfinite(tv_epsilon) || tv_epsilon < 0.0) {
    throw DomainError("tv_epsilon must be finite and >= 0");
  }
}

double default_lambda(const MeasurementSystem& system) {
  // Data-scaled so the weight tracks the signal magnitude; the constant was
  // picked on the builtin scenes, where it keeps reconstruction quality
  // rising with the sampling rate instead of flattening into the TV bias.
  return 0.005 * system.adjoint(system.signal()).lpNorm<Eigen::Infinity>();
}

double effective_lambda(const MeasurementSystem& system, const SolverConfig& config) {
  return config.lambda ? *config.lambda : default_lambda(system);
}

namespace {

double tv_term(const MeasurementSystem& system, const Eigen::VectorXd& x, double eps) {
  if (system.mode() == PatternMode::PerStrip) {
    return tv_value_stacked(x, system.n(), system.q(), eps);
  }
  if (system.q() == 1) {
    return tv_value_single_strip(x, eps);
  }
  Eigen::Map<const Eigen::MatrixXd> mat(x.data(), system.n(), system.q());
  return tv_value_matrix(mat, eps);
}

Eigen::VectorXd tv_term_gradient(const MeasurementSystem& system, const Eigen::VectorXd& x,
                                 double eps) {
  if (system.mode() == PatternMode::PerStrip) {
    return tv_gradient_stacked(x, system.n(), system.q(), eps);
  }
  if (system.q() == 1) {
    return tv_gradient_single_strip(x, eps);
  }
  Eigen::Map<const Eigen::MatrixXd> mat(x.data(), system.n(), system.q());
  Eigen::MatrixXd grad = tv_gradient_matrix(mat, eps);
  return Eigen::Map<Eigen::VectorXd>(grad.data(), grad.size());
}

// f and grad f for one (system, lambda, eps) instance.
struct Objective {
  const MeasurementSystem& system;
  double lambda;
  double eps;

  double value(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd residual = system.apply(x) - system.signal();
    double v = residual.squaredNorm();
    if (lambda > 0.0) v += lambda * tv_term(system, x, eps);
    return v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = 2.0 * system.adjoint(system.apply(x) - system.signal());
    if (lambda > 0.0) g += lambda * tv_term_gradient(system, x, eps);
    return g;
  }
};

Eigen::VectorXd backprojection_start(const MeasurementSystem& system) {
  Eigen::VectorXd x0 = system.adjoint(system.signal());
  const double forward_norm = system.apply(x0).norm();
  if (forward_norm > 0.0) {
    x0 *= system.signal().norm() / forward_norm;
  } else {
    x0.setZero();
  }
  return x0;
}

ReconstructionResult minimize(const MeasurementSystem& system, const SolverConfig& config) {
  config.validate();
  if (!(config.tv_epsilon > 0.0)) {
    throw UnsupportedConfigError(
        "solver needs tv_epsilon > 0; the unsmoothed objective is not differentiable");
  }
  const Objective objective{system, effective_lambda(system, config), config.tv_epsilon};

  Eigen::VectorXd x = backprojection_start(system);
  double fx = objective.value(x);
  if (!std::isfinite(fx)) {
    throw NumericalError("non-finite objective at iteration 0");
  }

  ReconstructionResult result;
  result.objective_trace.push_back(fx);
  result.rel_change.push_back(std::numeric_limits<double>::infinity());

  Eigen::VectorXd y = x;       // extrapolation point
  Eigen::VectorXd x_prev = x;
  double momentum = 1.0;       // FISTA t_k
  double step_l = 1.0;         // local Lipschitz estimate
  bool converged = false;
  int iter = 0;

  // Backtracks from `base` along -g until the quadratic majorization holds.
  // Returns false when no measurable decrease is possible (stationarity).
  const auto descend = [&](const Eigen::VectorXd& base, double f_base, const Eigen::VectorXd& g,
                           Eigen::VectorXd& z_out, double& f_out) {
    const double g_norm2 = g.squaredNorm();
    if (g_norm2 == 0.0) return false;
    const double f_slack = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(f_base);
    for (int attempt = 0; attempt < 220; ++attempt) {
      z_out = base - g / step_l;
      f_out = objective.value(z_out);
      if (!std::isfinite(f_out)) {
        step_l *= 2.0;
        continue;
      }
      const double required = g_norm2 / (2.0 * step_l);
      if (f_out <= f_base - required + f_slack) {
        return required > f_slack;  // no real progress once the decrease drowns in rounding
      }
      step_l *= 2.0;
    }
    throw NumericalError("line search failed at iteration " + std::to_string(iter + 1));
  };

  Eigen::VectorXd z(x.size());
  double fz = 0.0;
  bool extrapolated = false;  // y differs from x
  for (iter = 1; iter <= config.max_iters; ++iter) {
    step_l *= 0.9;
    Eigen::VectorXd g = objective.gradient(y);
    const double fy = objective.value(y);
    if (!std::isfinite(fy)) {
      throw NumericalError("non-finite objective at iteration " + std::to_string(iter));
    }

    bool moved = descend(y, fy, g, z, fz);
    if (extrapolated && (!moved || fz > fx)) {
      // The extrapolated point stalled or went uphill; restart from the
      // best iterate with a plain gradient step, which cannot increase f.
      momentum = 1.0;
      y = x;
      extrapolated = false;
      g = objective.gradient(x);
      moved = descend(x, fx, g, z, fz);
    }
    if (!moved) {
      converged = true;  // numerically stationary
      result.iterations = iter - 1;
      break;
    }

    x_prev.swap(x);
    x = z;
    fx = fz;

    const double step_norm = (x - x_prev).norm();
    const double rel = step_norm / std::max(x.norm(), 1e-300);
    result.objective_trace.push_back(fx);
    result.rel_change.push_back(rel);
    result.iterations = iter;

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (g.dot(x - x_prev) > 0.0) {
      momentum = 1.0;  // adaptive restart
      y = x;
      extrapolated = false;
    } else {
      y = x + ((momentum - 1.0) / next_momentum) * (x - x_prev);
      momentum = next_momentum;
      extrapolated = true;
    }

    if (rel <= config.rel_tol) {
      converged = true;
      break;
    }
  }

  result.converged = converged;
  Eigen::MatrixXd estimate = Eigen::Map<const Eigen::MatrixXd>(x.data(), system.n(), system.q());
  if (config.nonneg_clip) {
    estimate = estimate.cwiseMax(0.0).cwiseMin(1.0);
  }
  result.estimate = std::move(estimate);
  return result;
}

}  // namespace

double objective_value(const MeasurementSystem& system, const Eigen::VectorXd& x,
                       const SolverConfig& config) {
  config.validate();
  if (x.size() != static_cast<Eigen::Index>(system.n()) * system.q()) {
    throw DimensionError("iterate must have length n*q");
  }
  return Objective{system, effective_lambda(system, config), config.tv_epsilon}.value(x);
}

Eigen::VectorXd objective_gradient(const MeasurementSystem& system, const Eigen::VectorXd& x,
                                   const SolverConfig& config) {
  config.validate();
  if (x.size() != static_cast<Eigen::Index>(system.n()) * system.q()) {
    throw DimensionError("iterate must have length n*q");
  }
  if (!(config.tv_epsilon > 0.0)) {
    throw UnsupportedConfigError(
        "objective gradient needs tv_epsilon > 0 (subgradient regime is unsupported)");
  }
  return Objective{system, effective_lambda(system, config), config.tv_epsilon}.gradient(x);
}

ReconstructionResult solve_per_strip(const MeasurementSystem& system, const SolverConfig& config) {
  if (system.mode() != PatternMode::PerStrip) {
    throw DimensionError("solve_per_strip needs a mode-2 (per-strip) measurement system");
  }
  return minimize(system, config);
}

ReconstructionResult solve_invariant(const MeasurementSystem& system, const SolverConfig& config) {
  if (system.mode() != PatternMode::Invariant) {
    throw DimensionError("solve_invariant needs a mode-1 (invariant) measurement system");
  }
  return minimize(system, config);
}

ReconstructionResult solve(const MeasurementSystem& system, const SolverConfig& config) {
  return system.mode() == PatternMode::PerStrip ? solve_per_strip(system, config)
                                                : solve_invariant(system, config);
}

void write_trace_csv(const ReconstructionResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << "iteration,objective,relative_change\n";
  char line[96];
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, result.objective_trace[i],
                  result.rel_change[i]);
    out << line;
  }
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

}  // namespace pbgi
