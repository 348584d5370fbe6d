#pragma once

#include <stdexcept>
#include <string>

namespace fpdtl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A probability row does not sum to one within tolerance.
class NonStochasticError : public Error {
 public:
  using Error::Error;
};

/// A probability entry is negative or not finite.
class NegativeEntryError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions disagree with the declared state/action space.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A state or action index lies outside its space.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Every action of some state is excluded by the ideal model.
class DegenerateIdealError : public Error {
 public:
  using Error::Error;
};

/// The ideal joint vanishes where a positive value is required.
class AllZeroIdealError : public Error {
 public:
  using Error::Error;
};

/// A canned model was requested for an unsupported space size.
class WrongSizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input file / configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpdtl
