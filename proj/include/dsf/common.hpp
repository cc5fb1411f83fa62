#pragma once

#include <stdexcept>
#include <string>

namespace dsf {

/// Numerical failure (factorization breakdown, iteration non-convergence).
/// Carries the offending residual when one is available.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// File format or filesystem problem.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsf
