#pragma once

#include <stdexcept>
#include <string>

namespace geomorph {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point outside a field's chart domain, or an evaluation that left the
// domain of a smooth formula (log of a nonpositive jet, division by a jet
// whose value part vanishes, ...).
struct DomainError : Error {
  using Error::Error;
};

// Invalid configuration value (jet order outside {1,2,3}, nonpositive
// sample count, malformed config file, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Metric whose component matrix is not invertible / not positive definite
// at the evaluation point.
struct SingularMetricError : Error {
  using Error::Error;
};

// Tensor or jet shape mismatch (wrong vector length, incompatible jet
// dimension/order, non-symmetric metric components, ...).
struct ShapeError : Error {
  using Error::Error;
};

// A documented precondition of an operation does not hold at the point
// (non-unit vector where a unit one is required, map not horizontally
// conformal where the frame route needs it, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// Orthonormal frame construction failed (candidate vectors exhausted).
struct FrameError : Error {
  using Error::Error;
};

// Chart dimensions incompatible with the operation (metric vs map,
// classification machinery on targets of dimension < 3, ...).
struct DimensionError : Error {
  using Error::Error;
};

// Differential does not have full rank where a submersion is required.
struct SubmersionError : Error {
  using Error::Error;
};

// Vector field vanishes where a nonzero one is required.
struct ZeroLocusError : Error {
  using Error::Error;
};

// Constructor input data violates a structural constraint; the message
// names the constraint and the worst offending point.
struct ValidationError : Error {
  using Error::Error;
};

// Rejection sampling failed to find enough admissible points.
struct SamplingError : Error {
  using Error::Error;
};

// Command line usage error (unknown suite name, ...). Maps to exit code 2.
struct UsageError : Error {
  using Error::Error;
};

// Report file could not be written or config file could not be read.
// Maps to exit code 3.
struct IoError : Error {
  using Error::Error;
};

}  // namespace geomorph
