#pragma once

#include <stdexcept>
#include <string>

namespace phasemem {

/// Argument outside the mathematical domain of an operation (negative time, T <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller violated a documented precondition (mismatched meshes, empty history, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method hit its iteration cap.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Newton solve inside a time step did not reach tolerance.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, int step, double residual)
      : std::runtime_error(what), step_(step), residual_(residual) {}

  int step() const noexcept { return step_; }
  double residual() const noexcept { return residual_; }

 private:
  int step_;
  double residual_;
};

/// The temperature line search could not keep every node strictly positive.
class PositivityFailure : public StepFailure {
 public:
  using StepFailure::StepFailure;
};

}  // namespace phasemem
