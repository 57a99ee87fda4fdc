#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lbkit {

/// Base of every error thrown by lbkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input (parameters, materials, config values).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Parameters that would make the scheme unstable (tau <= 1/2, omega outside (0,2)).
class StabilityError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class GeometryError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
  ParseError(const std::string& what, std::size_t line)
    : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Density went non-positive or non-finite. The step is filled in by the driver.
class NumericalBlowup : public Error {
public:
  explicit NumericalBlowup(const std::string& what, std::size_t step = 0)
    : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// Wet-node boundary whose density closure divides by ~0.
class SingularBoundary : public Error {
public:
  using Error::Error;
};

class OptimizerError : public Error {
public:
  using Error::Error;
};

/// Line search exhausted its attempts. Carries the best point it saw.
class StepFailure : public OptimizerError {
public:
  StepFailure(const std::string& what, double bestStep, double bestValue)
    : OptimizerError(what), bestStep_(bestStep), bestValue_(bestValue) {}

  double bestStep() const noexcept { return bestStep_; }
  double bestValue() const noexcept { return bestValue_; }

private:
  double bestStep_;
  double bestValue_;
};

class MaxIterFailure : public OptimizerError {
public:
  MaxIterFailure(const std::string& what, std::vector<double> control, double value)
    : OptimizerError(what), control_(std::move(control)), value_(value) {}

  const std::vector<double>& control() const noexcept { return control_; }
  double value() const noexcept { return value_; }

private:
  std::vector<double> control_;
  double value_;
};

} // namespace lbkit
