#pragma once

#include <stdexcept>
#include <string>

namespace pinnet {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input: bad matrix shape/content, config errors.
// The CLI maps these to exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

// Numerical breakdown: non-finite values, solver failure.
struct NumericError : Error {
  using Error::Error;
};

// Strong connectivity (or irreducibility) required but absent.
struct ConnectivityError : Error {
  using Error::Error;
};

// A certificate cannot be evaluated on the given data (as opposed to
// evaluating to "fail").
struct CertificateError : Error {
  using Error::Error;
};

}  // namespace pinnet
