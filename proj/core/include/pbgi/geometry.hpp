#pragma once

// Scan geometry of the push-broom acquisition. One new strip enters the
// detector footprint per frame when the platform velocity matches the strip
// resolution times the sampling frequency (v = r * f).

#include <cmath>
#include <string>

#include "pbgi/errors.hpp"

namespace pbgi {

// True iff |v - r*f| / (r*f) <= tol. Inputs must be positive.
inline bool check_synchronization(double strip_resolution, double sampling_frequency,
                                  double velocity, double tol) {
  if (!(strip_resolution > 0.0) || !(sampling_frequency > 0.0) || !(velocity > 0.0)) {
    throw DomainError("strip resolution, sampling frequency, and velocity must be positive");
  }
  if (!(tol >= 0.0)) {
    throw DomainError("synchronization tolerance must be >= 0");
  }
  const double nominal = strip_resolution * sampling_frequency;
  return std::abs(velocity - nominal) / nominal <= tol;
}

struct ScanGeometry {
  int m = 0;  // detector rows
  int n = 0;  // across-track resolution
  int q = 0;  // strips to reconstruct
  double strip_resolution = 248e-6;   // r, meters
  double sampling_frequency = 2.0;    // f, Hz
  double velocity = 248e-6 * 2.0;     // v, meters/second
  double sync_tol = 1e-9;             // relative, loose enough for simulated scans

  void validate() const {
    if (m < 1 || n < 2 || q < 1) {
      throw GeometryError("geometry needs m >= 1, n >= 2, q >= 1, got m=" + std::to_string(m) +
                          " n=" + std::to_string(n) + " q=" + std::to_string(q));
    }
    if (m > n) {
      throw GeometryError("sampling rate m/n = " + std::to_string(m) + "/" + std::to_string(n) +
                          " exceeds 1; compressive operation needs m <= n");
    }
    if (!check_synchronization(strip_resolution, sampling_frequency, velocity, sync_tol)) {
      throw GeometryError("scan is not synchronized: v=" + std::to_string(velocity) +
                          " vs r*f=" + std::to_string(strip_resolution * sampling_frequency));
    }
  }
};

// eta = m / n; 1 means Nyquist-complete, below 1 is compressive.
inline double sampling_rate(const ScanGeometry& geometry) {
  geometry.validate();
  return static_cast<double>(geometry.m) / static_cast<double>(geometry.n);
}

}  // namespace pbgi
