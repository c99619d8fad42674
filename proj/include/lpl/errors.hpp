#pragma once

#include <stdexcept>
#include <string>

namespace lpl {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad command line, config file, or other caller-side input.
/// The CLI maps these to exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical / domain errors. The CLI maps these to exit code 2.

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct InvalidRho : Error {
  using Error::Error;
};

struct ZeroColumn : Error {
  using Error::Error;
};

struct InvalidSparsity : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct DegenerateRegime : Error {
  using Error::Error;
};

struct Underdetermined : Error {
  using Error::Error;
};

struct SingularGram : Error {
  using Error::Error;
};

struct SingularSubmatrix : Error {
  using Error::Error;
};

struct InvalidConstants : Error {
  using Error::Error;
};

struct DegenerateGeometry : Error {
  using Error::Error;
};

struct DegenerateSparsity : Error {
  using Error::Error;
};

struct InsufficientDof : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace lpl
