#pragma once

#include <stdexcept>
#include <string>

namespace abshr {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A filter specification cannot be realized (e.g. cutoff at or above Nyquist).
class DesignError : public Error {
 public:
  using Error::Error;
};

// The input carries no usable information (constant or silent data).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A composite value is internally inconsistent (mismatched band lengths, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// File could not be read, parsed, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace abshr
