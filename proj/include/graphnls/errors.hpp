#pragma once

#include <stdexcept>
#include <string>

namespace graphnls {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameterError : Error {
  using Error::Error;
};

struct UnsupportedTopologyError : Error {
  using Error::Error;
};

struct MeshTooCoarseError : Error {
  using Error::Error;
};

struct NumericalFailureError : Error {
  using Error::Error;
};

struct OutOfRegimeError : Error {
  using Error::Error;
};

struct UndefinedExponentError : Error {
  using Error::Error;
};

struct CannotProjectError : Error {
  using Error::Error;
};

struct SingularJacobianError : Error {
  using Error::Error;
};

struct ConfigurationError : Error {
  using Error::Error;
};

}  // namespace graphnls
