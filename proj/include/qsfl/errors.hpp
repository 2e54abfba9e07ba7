#pragma once

#include <stdexcept>
#include <string>

namespace qsfl {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (bad JSON, out-of-domain parameters).
// The CLI maps these to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Argument outside an operation's stated domain.
struct DomainError : ConfigError {
  using ConfigError::ConfigError;
};

// Numeric failures. The CLI maps these to exit code 3.
struct SolverError : Error {
  using Error::Error;
};

struct NonConvergence : SolverError {
  using SolverError::SolverError;
};

struct BracketingFailure : SolverError {
  using SolverError::SolverError;
};

struct QuadratureFailure : SolverError {
  using SolverError::SolverError;
};

// Frame enumeration would exceed the configured state-space cap.
struct CapExceeded : SolverError {
  using SolverError::SolverError;
};

// Water-filling over an empty frame.
struct EmptyFrame : DomainError {
  using DomainError::DomainError;
};

// Requested source rate exceeds the per-block buffer cap.
struct RateOverBuffer : DomainError {
  using DomainError::DomainError;
};

// Policy queried with a solution whose multiplier was never solved.
struct UnsolvedLambda : SolverError {
  using SolverError::SolverError;
};

// Requested operating point cannot be reached by the scheme.
struct Unachievable : SolverError {
  using SolverError::SolverError;
};

// Gain formula invoked without the rate-fit it depends on.
struct MissingFit : SolverError {
  using SolverError::SolverError;
};

}  // namespace qsfl
