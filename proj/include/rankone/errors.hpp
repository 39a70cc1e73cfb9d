#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

// Three families, matching the CLI exit codes: bad input (2), numerical
// failure (3), filesystem trouble (4).

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config text that is not valid JSON or does not follow the schema.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, int line, std::string field)
      : InputError(msg), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// A parameter or model function violates one of the hypotheses H1..H6.
class ValidationError : public InputError {
 public:
  ValidationError(const std::string& msg, std::string hypothesis)
      : InputError(msg), hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class UnknownPreset : public InputError {
 public:
  using InputError::InputError;
};

class SpecInvalid : public InputError {
 public:
  using InputError::InputError;
};

class SpecMismatch : public InputError {
 public:
  using InputError::InputError;
};

/// A logarithm (or fractional power) argument left its domain. Leaving the
/// domain of definition is dynamics information, so this is never a NaN.
class LogDomainError : public NumericalError {
 public:
  LogDomainError(const std::string& where, double value);
  double value() const { return value_; }

 private:
  double value_;
};

class H5Violated : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotBracketed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPeriodic : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCritical : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InverseFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyBounds : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace rankone
