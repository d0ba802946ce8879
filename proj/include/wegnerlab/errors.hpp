#pragma once

#include <stdexcept>
#include <string>

namespace wl {

/// Mismatched particle count or dimension between two objects.
struct DimensionError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or distribution configuration.
struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// A random field does not cover a lattice point that an operator needs.
struct CoverageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Dense routine asked to handle a matrix above the dense threshold.
struct CapacityError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ArgumentError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

} // namespace wl
