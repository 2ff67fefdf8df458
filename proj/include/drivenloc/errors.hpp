#pragma once

#include <stdexcept>
#include <string>

namespace drivenloc {

/// Invalid or inconsistent configuration (bad density table, missing field, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested problem does not fit the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical result could not be produced to the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a formula.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed a structural check (non-unitary matrix, mismatched run ids, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The spectral parameter sits on the spectrum of the restricted operator.
class SingularResolventError : public std::runtime_error {
 public:
  SingularResolventError(const std::string& what, double nearest)
      : std::runtime_error(what), nearest_eigenvalue(nearest) {}
  double nearest_eigenvalue;
};

}  // namespace drivenloc
