#pragma once

#include <stdexcept>
#include <string>

namespace rotcool {

// Bad input: a field, argument, or precondition is out of range.
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& constraint)
      : std::invalid_argument(field + ": " + constraint), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// The requested physics lies outside the validity of the model
// (weak-pulse limit, comb regime, no cooling fixed point, ...).
class RegimeError : public std::domain_error {
public:
  RegimeError(std::string flag, const std::string& what)
      : std::domain_error(flag + ": " + what), flag_(std::move(flag)) {}

  const std::string& flag() const noexcept { return flag_; }

private:
  std::string flag_;
};

// An integrator or solver could not meet its accuracy contract.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rotcool
