#include "wegnerlab/spectral.hpp"

#include "wegnerlab/errors.hpp"

#include <algorithm>
#include <limits>

namespace wl {

namespace {
constexpr double kPivotFloor    = 1e-14;
constexpr double kShiftStep     = 1e-12;
constexpr int    kMaxShifts     = 64;
constexpr double kBisectionTol  = 1e-12;
} // namespace

Spectrum::Spectrum(Eigen::VectorXd eigenvalues)
  : values_(std::move(eigenvalues))
{
  std::sort(values_.data(), values_.data() + values_.size());
}

Eigen::Index Spectrum::count_below(double E) const
{
  return std::lower_bound(values_.data(), values_.data() + values_.size(), E) - values_.data();
}

Spectrum full_spectrum(SymMatrix const &A)
{
  if (A.dim() > SymMatrix::kDenseThreshold) {
    throw CapacityError("matrix of dimension " + std::to_string(A.dim()) +
                        " exceeds the dense threshold; use count_below / dist_by_bisection");
  }
  return full_spectrum(A.dense());
}

namespace detail {

Band<double> lower_band(SymMatrix const &A)
{
  Eigen::Index const b = A.half_bandwidth();
  Band<double>       band = Band<double>::Zero(b + 1, A.dim());
  A.for_each_nonzero([&](Eigen::Index i, Eigen::Index j, double v) {
    if (i >= j) { band(i - j, j) = v; }
  });
  return band;
}

} // namespace detail

namespace {

CountResult count_with_band(detail::Band<double> const &band, double scale, double E)
{
  double const floor = kPivotFloor * scale;
  for (int k = 0; k <= kMaxShifts; ++k) {
    double const shift = k * kShiftStep * scale;
    if (auto negative = detail::band_inertia<double>(band, E + shift, floor)) {
      return {*negative, shift};
    }
  }
  throw std::runtime_error("count_below: no non-degenerate shift found near E");
}

struct Counter
{
  explicit Counter(SymMatrix const &A)
    : band(detail::lower_band(A))
    , scale(1.0 + A.inf_norm())
  {
  }
  Eigen::Index operator()(double x) const { return count_with_band(band, scale, x).count; }

  detail::Band<double> band;
  double               scale;
};

// Smallest x with count(x) > index, i.e. eigenvalue number `index` (0-based),
// bracketed by count(lo) <= index < count(hi).
double locate_eigenvalue(Counter const &count, Eigen::Index index, double lo, double hi)
{
  while (hi - lo > kBisectionTol * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    double const mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) { break; }
    if (count(mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

CountResult count_below(SymMatrix const &A, double E)
{
  return count_with_band(detail::lower_band(A), 1.0 + A.inf_norm(), E);
}

double dist_to_spectrum(Spectrum const &spectrum, double E)
{
  Eigen::Index const k      = spectrum.count_below(E);
  double             result = std::numeric_limits<double>::infinity();
  if (k < spectrum.dim()) { result = spectrum[k] - E; }
  if (k > 0) { result = std::min(result, E - spectrum[k - 1]); }
  return result;
}

double dist_by_bisection(SymMatrix const &A, double E)
{
  Counter const      count(A);
  auto const [glo, ghi] = A.gershgorin();
  double const       lo_bound = glo - 1.0;
  double const       hi_bound = ghi + 1.0;
  Eigen::Index const k        = count(E);
  double             result   = std::numeric_limits<double>::infinity();
  if (k < A.dim()) { result = locate_eigenvalue(count, k, E, std::max(hi_bound, E + 1.0)) - E; }
  if (k > 0) { result = std::min(result, E - locate_eigenvalue(count, k - 1, std::min(lo_bound, E - 1.0), E)); }
  return std::max(result, 0.0);
}

double dist_to_spectrum(SymMatrix const &A, double E)
{
  if (A.dim() <= SymMatrix::kDenseThreshold) { return dist_to_spectrum(full_spectrum(A), E); }
  return dist_by_bisection(A, E);
}

std::optional<double> resolvent_norm(Spectrum const &spectrum, double E)
{
  double const dist = dist_to_spectrum(spectrum, E);
  if (dist == 0.0) { return std::nullopt; }
  return 1.0 / dist;
}

std::optional<double> resolvent_norm(SymMatrix const &A, double E)
{
  double const dist = dist_to_spectrum(A, E);
  if (dist == 0.0) { return std::nullopt; }
  return 1.0 / dist;
}

double smallest_singular_value(SymMatrix const &A, double E)
{
  if (A.dim() > SymMatrix::kDenseThreshold) {
    throw CapacityError("smallest_singular_value needs a dense matrix");
  }
  return smallest_singular_value(A.dense(), E);
}

} // namespace wl
