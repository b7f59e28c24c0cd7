#pragma once

#include <stdexcept>
#include <string>

namespace ntdist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeds a table limit or a configured memory ceiling.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Only weight-12, level-1 cusp forms are implemented.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit on a degenerate design.
class FitError : public Error {
 public:
  using Error::Error;
};

/// A numerical target could not be met; carries the best value reached.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

}  // namespace ntdist
