#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pentest {

/// Argument outside the mathematical domain of an operation (negative
/// threshold, quantile outside [0,1], buffering epsilon >= 1/2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not defined for the given constraint variant.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A deferred-acceptance invariant was broken during execution. Always a
/// mechanism bug, never bad user input.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No feasible superset exists for a subset that must be padded.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance too large for an exact routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Estimator has nothing to divide by.
class DegenerateInstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. `path` names the offending field,
/// e.g. "mechanism.kind".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pentest
