#pragma once

#include "wegnerlab/randomfield.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace wl {

/// One-step transfer matrix of psi(x+1) = (2 + v - E) psi(x) - psi(x-1):
/// [[2 + v - E, -1], [1, 0]]. Determinant 1.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> transfer_matrix(Scalar E, Scalar v)
{
  Eigen::Matrix<Scalar, 2, 2> T;
  T << Scalar(2) + v - E, Scalar(-1), Scalar(1), Scalar(0);
  return T;
}

struct LyapunovEstimate
{
  double gamma   = 0.0;
  double stderr_ = 0.0;
  int    batches = 0;
};

/// Top Lyapunov exponent of the random product T_steps ... T_1 from the norm
/// growth of a single vector renormalised after every step. The potential at
/// step k is sample_value(spec, seed, trial, {k}); the measure is not
/// validated, so point masses are allowed. Standard error from batch means.
LyapunovEstimate lyapunov(double E,
                          DistributionSpec const &spec,
                          std::int64_t steps,
                          std::uint64_t seed,
                          std::uint64_t trial = 0,
                          int batches = 50);

} // namespace wl
