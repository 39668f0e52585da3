#pragma once

#include <stdexcept>
#include <string>

namespace shom {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete configuration (missing k0, bad CSV, unknown key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or optimizer failed to reach the requested tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Discretization too coarse for the requested evaluation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The data or model carries no information about the deflection.
class NonIdentifiableError : public Error {
 public:
  using Error::Error;
};

/// Pattern fit failed from every start; carries the best residual seen.
class FitError : public Error {
 public:
  FitError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace shom
