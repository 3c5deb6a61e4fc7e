#ifndef FAIRPLUG_ERROR_H_
#define FAIRPLUG_ERROR_H_

#include <stdexcept>
#include <string>

namespace fairplug {

// Base class for every error raised by the library. Callers that only need
// to distinguish "our" failures from foreign exceptions catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration supplied by a caller (CLI exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data violates a precondition: missing column, degenerate class
// balance, norm bound broken (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

// A numeric routine produced a non-finite value or failed to converge in a
// way the caller cannot ignore (CLI exit code 4).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairplug

#endif  // FAIRPLUG_ERROR_H_
