#pragma once

#include <stdexcept>
#include <string>

namespace cvv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on an operator or state was violated
/// (non-Hermitian generator, impure target, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The Fock truncation is too small for the requested state: the tail
/// mass in the last basis vector exceeds the configured tolerance.
class TruncationTooSmall : public Error {
 public:
  TruncationTooSmall(const std::string& what, double tail_mass, int dimension)
      : Error(what), tail_mass_(tail_mass), dimension_(dimension) {}

  double tail_mass() const noexcept { return tail_mass_; }
  int dimension() const noexcept { return dimension_; }

 private:
  double tail_mass_;
  int dimension_;
};

class DegenerateDecomposition : public Error {
 public:
  using Error::Error;
};

/// Invalid protocol or run parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvv
