#pragma once

// Reconstruction of the scene from an assembled measurement system by
// minimizing  ||A x - y||^2 + lambda * TV_eps(x).
//
// The TV stencil follows the emission mode: per-strip systems use the
// stacked seam-aware stencil, invariant systems the matrix stencil (falling
// back to across-track-only differences when the scan has a single strip).
// The minimizer is a monotone accelerated gradient scheme with backtracking
// line search, so the objective trace never increases.

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <vector>

#include "pbgi/errors.hpp"
#include "pbgi/forward_model.hpp"

namespace pbgi {

struct SolverConfig {
  // Regularization weight; unset selects 0.005 * ||A^T y||_inf for the
  // system at hand, which keeps the weight proportional to the data scale.
  std::optional<double> lambda{};
  int max_iters = 2000;
  double rel_tol = 1e-6;      // stop when the iterate's relative change falls below
  double tv_epsilon = 1e-8;   // TV smoothing constant; must be > 0 to solve
  bool nonneg_clip = true;    // clip the final estimate into [0, 1]

  void validate() const;
};

struct ReconstructionResult {
  Eigen::MatrixXd estimate;            // n x q
  std::vector<double> objective_trace; // entry 0 is the initial objective
  std::vector<double> rel_change;      // iterate relative change per entry; [0] = inf
  int iterations = 0;
  bool converged = false;              // true when rel_tol stopped the iteration
};

double default_lambda(const MeasurementSystem& system);
double effective_lambda(const MeasurementSystem& system, const SolverConfig& config);

// Value and gradient of the smoothed objective at a stacked iterate
// (length n*q). The gradient requires tv_epsilon > 0.
double objective_value(const MeasurementSystem& system, const Eigen::VectorXd& x,
                       const SolverConfig& config);
Eigen::VectorXd objective_gradient(const MeasurementSystem& system, const Eigen::VectorXd& x,
                                   const SolverConfig& config);

// Per-strip (mode 2) program on the stacked vector.
ReconstructionResult solve_per_strip(const MeasurementSystem& system, const SolverConfig& config);

// Invariant (mode 1) program in matrix form.
ReconstructionResult solve_invariant(const MeasurementSystem& system, const SolverConfig& config);

// Dispatches on the system's mode.
ReconstructionResult solve(const MeasurementSystem& system, const SolverConfig& config);

// Trace export: one line per iterate with columns iteration, objective,
// relative_change.
void write_trace_csv(const ReconstructionResult& result, const std::filesystem::path& path);

}  // namespace pbgi
