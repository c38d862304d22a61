#pragma once

#include <stdexcept>
#include <string>

namespace gqg {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree with each other or with the grid.
class DimensionError : public Error {
 public:
  DimensionError(const std::string& operand, const std::string& detail)
      : Error("dimension mismatch in '" + operand + "': " + detail), operand_(operand) {}
  const std::string& operand() const noexcept { return operand_; }

 private:
  std::string operand_;
};

// Invalid configuration or precondition on user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A state violates a structural constraint (divergence, impermeability,
// GPV mean/compatibility identities). Residuals are carried for reporting.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, double first, double second)
      : Error(what), first_(first), second_(second) {}
  double first_residual() const noexcept { return first_; }
  double second_residual() const noexcept { return second_; }

 private:
  double first_;
  double second_;
};

// Non-finite values, CFL violation, or energy blow-up during time stepping.
class NumericalInstability : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gqg
