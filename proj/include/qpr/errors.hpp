#pragma once

#include <stdexcept>
#include <string>

namespace qpr {

// Error kinds map onto process exit codes in the CLI:
//   convergence failures -> 2, domain/analyticity violations -> 3,
//   bad configuration -> 4, missing input artifact -> 5, failed verification -> 6.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConvergenceError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct MissingArtifact : Error {
  using Error::Error;
};
struct VerificationFailed : Error {
  using Error::Error;
};

// -- convergence family
struct NoConvergence : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};
struct WindowNotFound : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};
struct RootLost : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};

// -- domain family
struct DomainEscape : DomainError {
  using DomainError::DomainError;
};
struct ImageEscape : DomainError {
  using DomainError::DomainError;
};
struct IllConditioned : DomainError {
  using DomainError::DomainError;
};
struct ModeOutOfRange : DomainError {
  using DomainError::DomainError;
};
struct DegenerateMinimum : DomainError {
  using DomainError::DomainError;
};
struct NotRenormalizable : DomainError {
  using DomainError::DomainError;
};
struct NotInX : DomainError {
  using DomainError::DomainError;
};
struct NotOnSigma1 : DomainError {
  using DomainError::DomainError;
};
struct DegenerateExtremum : DomainError {
  using DomainError::DomainError;
};
struct ZeroDenominator : DomainError {
  using DomainError::DomainError;
};
struct OrbitEscape : DomainError {
  using DomainError::DomainError;
};
struct PeriodMismatch : DomainError {
  using DomainError::DomainError;
};
struct NonAttracting : DomainError {
  using DomainError::DomainError;
};

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const VerificationFailed*>(&e)) return 6;
  if (dynamic_cast<const MissingArtifact*>(&e)) return 5;
  if (dynamic_cast<const ConfigError*>(&e)) return 4;
  if (dynamic_cast<const DomainError*>(&e)) return 3;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 2;
  return 1;
}

}  // namespace qpr
