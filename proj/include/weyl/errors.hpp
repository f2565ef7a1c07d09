#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

/// Invalid configuration or argument; maps to CLI exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of iterations; maps to exit status 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant was violated (a bug, not bad input); exit status 4.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two objects were built on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  GridMismatch() : std::invalid_argument("grid mismatch") {}
};

}  // namespace weyl
