#pragma once

#include <stdexcept>
#include <string>

namespace lmipole {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class NotHurwitzError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised when a JSON/CSV document does not match its schema. The message
/// names the offending field path, e.g. `spec.region.alpha`.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmipole
