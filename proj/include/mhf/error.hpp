#pragma once

#include <stdexcept>
#include <string>

namespace mhf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (tables, maps, files, arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed the configured evaluation cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its stated accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mhf
