#pragma once

#include <stdexcept>
#include <string>

namespace vvfrac {

// Base class for every error raised by the library. The C API maps the
// concrete subclasses onto vvf_status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input geometry (zero-length segment, mismatched mesh/crack, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class MeshingError : public Error {
 public:
  using Error::Error;
};

// Linear solve failed or the discrete system is singular.
class SolverError : public Error {
 public:
  using Error::Error;
};

// The velocity field cannot be placed around a tip (tip too close to the
// boundary or another component).
class InfeasibleRadiusError : public Error {
 public:
  using Error::Error;
};

// Precondition violated by a caller (bad index, out-of-range parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vvfrac
