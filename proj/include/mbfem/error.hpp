#pragma once

#include <stdexcept>
#include <string>

namespace mbfem {

/// Invalid input: malformed config, inadmissible parameters, bad mesh.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when time integration cannot proceed (non-finite state, step
/// budget exhausted, interface collapse, invariant violation).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact files could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbfem
