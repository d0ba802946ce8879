#include "wegnerlab/transfer.hpp"

#include "wegnerlab/errors.hpp"

#include <cmath>

namespace wl {

LyapunovEstimate lyapunov(double E,
                          DistributionSpec const &spec,
                          std::int64_t steps,
                          std::uint64_t seed,
                          std::uint64_t trial,
                          int batches)
{
  if (steps < 1000) { throw ArgumentError("lyapunov needs at least 1000 steps"); }
  if (batches < 20 || batches > steps) { throw ArgumentError("lyapunov needs 20 <= batches <= steps"); }

  Eigen::Vector2d u(1.0, 0.0);
  Eigen::VectorXd batch_sum = Eigen::VectorXd::Zero(batches);
  Eigen::VectorXd batch_len = Eigen::VectorXd::Zero(batches);
  Site            point(1, 1);
  double          total = 0.0;

  for (std::int64_t k = 0; k < steps; ++k) {
    point[0]             = static_cast<int>(k);
    double const v       = sample_value(spec, seed, trial, point);
    u                    = transfer_matrix(E, v) * u;
    double const norm    = u.norm();
    double const growth  = std::log(norm);
    u /= norm;
    total += growth;
    auto const b = static_cast<Eigen::Index>(k * batches / steps);
    batch_sum(b) += growth;
    batch_len(b) += 1.0;
  }

  LyapunovEstimate out;
  out.gamma   = total / static_cast<double>(steps);
  out.batches = batches;
  Eigen::ArrayXd const means = batch_sum.array() / batch_len.array();
  double const         var   = (means - means.mean()).square().sum() / (batches - 1);
  out.stderr_                = std::sqrt(var / batches);
  return out;
}

} // namespace wl
