#pragma once

// Binary speckle illumination patterns and scan-length pattern sequences.
//
// A pattern is an m x n {0,1} matrix: row j is the illumination row seen by
// detector pixel j, n is the across-track resolution. Mode selects the
// emission scheme: Invariant keeps one pattern for the whole scan (mode 1),
// PerStrip emits a fresh pattern whenever a new strip enters the footprint
// (mode 2), which needs q + m - 1 patterns to cover q strips.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pbgi/errors.hpp"

namespace pbgi {

enum class PatternMode : int {
  Invariant = 1,  // one pattern for the whole scan
  PerStrip = 2,   // new pattern per strip entering the footprint
};

inline const char* mode_name(PatternMode mode) {
  return mode == PatternMode::Invariant ? "1" : "2";
}

struct SpecklePattern {
  Eigen::MatrixXd data;  // m x n, entries exactly 0 or 1

  explicit SpecklePattern(Eigen::MatrixXd values);

  int m() const { return static_cast<int>(data.rows()); }
  int n() const { return static_cast<int>(data.cols()); }
};

struct PatternSequence {
  std::vector<SpecklePattern> patterns;
  PatternMode mode = PatternMode::PerStrip;
  std::uint64_t seed = 0;

  PatternSequence(std::vector<SpecklePattern> pats, PatternMode mode, std::uint64_t seed);

  int m() const { return patterns.front().m(); }
  int n() const { return patterns.front().n(); }
  int length() const { return static_cast<int>(patterns.size()); }

  // Number of fully sampled strips this sequence can cover:
  // PerStrip covers length - m + 1; Invariant covers any count.
  int strip_count() const;

  // Pattern illuminating the footprint at scan step k (0-based).
  const SpecklePattern& at_step(int k) const;
};

// Entries drawn i.i.d. Bernoulli(1/2) from a deterministic engine; the same
// (m, n, seed) always reproduces the identical pattern.
SpecklePattern generate_pattern(int m, int n, std::uint64_t seed);

// Seed of pattern `index` within a generated sequence, exposed so a single
// pattern can be regenerated without building the whole sequence.
std::uint64_t sequence_pattern_seed(std::uint64_t seed, int index);

// Invariant -> a single pattern; PerStrip -> q + m - 1 patterns, pattern k
// seeded by (seed, k).
PatternSequence generate_sequence(int m, int n, int q, PatternMode mode, std::uint64_t seed);

// Flat binary interchange: magic "GISCPAT1", then m, n, L as little-endian
// 32-bit unsigned, then L*m*n bytes of {0,1}, each pattern row-major.
void save_pattern_sequence(const PatternSequence& seq, const std::filesystem::path& path);

// Mode is not part of the file; by default a one-pattern file loads as
// Invariant and anything longer as PerStrip. Pass `mode` to override.
PatternSequence load_pattern_sequence(const std::filesystem::path& path,
                                      std::optional<PatternMode> mode = std::nullopt);

}  // namespace pbgi
