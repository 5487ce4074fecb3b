#pragma once

#include <stdexcept>
#include <string>

namespace pbgi {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or size of an argument is wrong (m < 1, n < m, length mismatch, ...).
struct DimensionError : Error {
  using Error::Error;
};

// Scan geometry is invalid (sampling rate out of range, broken synchronization).
struct GeometryError : Error {
  using Error::Error;
};

// A strip or pattern index is out of range.
struct IndexError : Error {
  using Error::Error;
};

// Two objects that must describe the same scan disagree in their metadata.
struct ConsistencyError : Error {
  using Error::Error;
};

// File could not be read, written, or parsed. Message carries the path.
struct IoError : Error {
  using Error::Error;
};

// A numeric argument is outside its mathematical domain.
struct DomainError : Error {
  using Error::Error;
};

// Non-finite values appeared during an iterative computation.
struct NumericalError : Error {
  using Error::Error;
};

// The requested operation is not defined for this configuration.
struct UnsupportedConfigError : Error {
  using Error::Error;
};

// Unknown builtin name or similar key lookup failure.
struct LookupError : Error {
  using Error::Error;
};

// Curve fitting got too few (or degenerate) points.
struct FitError : Error {
  using Error::Error;
};

// A comparison needs paired records that are missing from a manifest.
struct PairingError : Error {
  using Error::Error;
};

}  // namespace pbgi
