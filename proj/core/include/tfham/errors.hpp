#pragma once

#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace tfham {

/// Root of every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (numbers, flags, config files).
class ParseError : public Error {
public:
  using Error::Error;
};

class DivisionByZeroError : public Error {
public:
  using Error::Error;
};

/// Invalid run description: non-positive basis parameters, h >= 0, etc.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Two series built over different (alpha, beta, gamma) or numeric modes.
class ParameterMismatchError : public Error {
public:
  using Error::Error;
};

/// An operation would produce a term outside the decaying basis t^(-e), e >= 0.
class BasisEscapeError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

/// The auxiliary operator cannot be inverted on a term whose preimage
/// exponent lies in its kernel.
class ResonanceError : public Error {
public:
  ResonanceError(const std::string& what, mpq_class exponent)
      : Error(what), exponent_(std::move(exponent)) {}
  const mpq_class& exponent() const noexcept { return exponent_; }

private:
  mpq_class exponent_;
};

/// Lower orders required by a recursion step are missing.
class SequencingError : public Error {
public:
  using Error::Error;
};

/// The series is non-positive where the square root of u^3/x is needed.
class BranchError : public Error {
public:
  using Error::Error;
};

/// Singular Pade denominator system or a pole at the evaluation point.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

/// Both shooting bracket endpoints classify the same way.
class BracketError : public Error {
public:
  using Error::Error;
};

class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, long double x) : Error(what), x_(x) {}
  long double position() const noexcept { return x_; }

private:
  long double x_;
};

/// Wraps a failure inside the order recursion with the offending order.
class EngineError : public Error {
public:
  EngineError(const std::string& what, int order) : Error(what), order_(order) {}
  int order() const noexcept { return order_; }

private:
  int order_;
};

} // namespace tfham
