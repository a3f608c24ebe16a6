#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dynheat {

/// Argument outside the domain where a kernel or operator is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or inadmissible configuration (exponents, grids, spec files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced inside a quadrature or reduction.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad measurement data handed to a fit (e.g. a nonpositive norm).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed-point or M-search loop failed to contract; carries the history.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace dynheat
