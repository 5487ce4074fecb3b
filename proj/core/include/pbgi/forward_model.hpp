#pragma once

// Push-broom scan simulation and measurement-system assembly.
//
// During a scan of q strips the detector runs for q + m - 1 steps. At step k
// (0-based) detector row j sees strip i = k - j; readouts outside [0, q) are
// zero (the region beyond the scene is black). Strip i is therefore measured
// m times, once per detector row, at steps i .. i + m - 1, and the m
// illumination rows that hit it form its staggered measurement matrix: row j
// of the matrix for strip i is row j of the pattern emitted at step i + j.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

#include "pbgi/errors.hpp"
#include "pbgi/geometry.hpp"
#include "pbgi/pattern.hpp"
#include "pbgi/scene.hpp"

namespace pbgi {

struct NoiseSpec {
  enum class Kind { None, AdditiveGaussian };
  Kind kind = Kind::None;
  double sigma = 0.0;  // detector units
  std::uint64_t seed = 0;

  bool active() const { return kind == Kind::AdditiveGaussian && sigma > 0.0; }
};

struct ScanMeta {
  int m = 0;
  int n = 0;
  int q = 0;
  PatternMode mode = PatternMode::PerStrip;
  std::uint64_t seed = 0;
  NoiseSpec noise;
};

struct ScanRecord {
  // frames(j, k) is detector row j at scan step k; q + m - 1 columns.
  Eigen::MatrixXd frames;
  ScanMeta meta;

  ScanRecord(Eigen::MatrixXd f, ScanMeta meta);

  int steps() const { return static_cast<int>(frames.cols()); }
};

// The assembled linear system. Both emission modes expose the same stacked
// view: signal() has length m*q and apply()/adjoint() act on stacked scenes
// of length n*q, strip-major. Invariant mode additionally has the matrix
// form signal_matrix() = Y' (m x q) with one shared matrix A'.
class MeasurementSystem {
 public:
  MeasurementSystem(PatternMode mode, int n, int q, std::vector<Eigen::MatrixXd> blocks,
                    Eigen::VectorXd stacked_signal);

  PatternMode mode() const { return mode_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int q() const { return q_; }

  // Staggered matrix of strip i; the shared matrix when mode is Invariant.
  const Eigen::MatrixXd& strip_matrix(int i) const;

  const Eigen::VectorXd& signal() const { return y_; }                    // length m*q
  Eigen::Map<const Eigen::MatrixXd> signal_matrix() const;                // m x q

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;    // A x
  Eigen::VectorXd adjoint(const Eigen::VectorXd& r) const;  // A^T r

  // Dense block-diagonal matrix (m*q x n*q). Small scans only; the solver
  // never needs it, oracle checks do.
  Eigen::MatrixXd dense_matrix() const;

 private:
  PatternMode mode_;
  int m_, n_, q_;
  std::vector<Eigen::MatrixXd> blocks_;  // q blocks, or 1 shared block for Invariant
  Eigen::VectorXd y_;
};

// Runs the scan: for every step and detector row, the noiseless readout is
// the inner product of the emitted pattern row with the strip under it (zero
// outside the scene), then additive noise is applied frame by frame with
// per-frame sub-seeds so frames could be generated in any order.
ScanRecord simulate_scan(const Scene& scene, const PatternSequence& seq,
                         const ScanGeometry& geometry, const NoiseSpec& noise = {});

// Staggered matrix of strip `strip_index` (0-based): row j is row j of the
// pattern emitted at step strip_index + j. Invariant mode returns the shared
// pattern for any valid index.
Eigen::MatrixXd assemble_strip_matrix(const PatternSequence& seq, int strip_index);

// Reorders detector frames into per-strip signals and pairs them with the
// staggered matrices. A noiseless record satisfies signal() = A x exactly.
MeasurementSystem assemble_system(const ScanRecord& record, const PatternSequence& seq);

// Flat binary interchange: magic "GISCSCN1", then m, n, q, mode as
// little-endian 32-bit unsigned, then (q+m-1)*m readouts as little-endian
// IEEE-754 doubles, frame-major (all rows of step 0, then step 1, ...).
void save_scan_record(const ScanRecord& record, const std::filesystem::path& path);
ScanRecord load_scan_record(const std::filesystem::path& path);

}  // namespace pbgi
