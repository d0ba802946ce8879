#pragma once

#include "wegnerlab/lattice.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wl {

/// Two-point measure: `hi` with probability p, `lo` otherwise.
struct Bernoulli
{
  double p  = 0.5;
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(Bernoulli const &) const = default;
};

struct Uniform
{
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(Uniform const &) const = default;
};

struct Finite
{
  std::vector<double> values;
  std::vector<double> weights;
  bool operator==(Finite const &) const = default;
};

/// The common single-site measure of the i.i.d. potential.
using DistributionSpec = std::variant<Bernoulli, Uniform, Finite>;

struct Violation
{
  std::string clause;
};

/// nullopt when the measure is admissible: bounded, normalised, and not
/// concentrated at a single point.
std::optional<Violation> validate(DistributionSpec const &spec);

/// Human-readable one-line form, e.g. "bernoulli(p=0.5,lo=0,hi=1)".
std::string describe(DistributionSpec const &spec);

/// P(V <= x)
double cdf(DistributionSpec const &spec, double x);

/// Inclusive [min, max] of the support.
std::pair<double, double> support_bounds(DistributionSpec const &spec);

/// Counter-based uniform variate in [0, 1) keyed by (seed, trial, point).
/// A pure function: no state, no dependence on call order.
double uniform_variate(std::uint64_t seed, std::uint64_t trial, Site const &point);

/// Inverse-CDF draw from `spec` using the keyed variate. Does not validate.
double sample_value(DistributionSpec const &spec, std::uint64_t seed, std::uint64_t trial, Site const &point);

/// One realisation of {V(x, omega)} on a finite set of single-particle points.
class FieldSample
{
public:
  FieldSample() = default;

  void set(Site const &point, double value);
  bool contains(Site const &point) const { return values_.contains(point); }
  /// Throws CoverageError for points outside the region.
  double value(Site const &point) const;

  std::size_t size() const { return values_.size(); }
  std::map<Site, double> const &values() const { return values_; }
  std::vector<Site> region() const;

  bool operator==(FieldSample const &) const = default;

private:
  std::map<Site, double> values_;
};

enum class Validation
{
  check,
  skip
};

/// Samples the field over `region`. Throws ConfigError when the measure fails
/// validation, unless `validation` is skip (diagnostics only).
FieldSample sample_field(DistributionSpec const &spec,
                         std::vector<Site> const &region,
                         std::uint64_t seed,
                         std::uint64_t trial,
                         Validation validation = Validation::check);

/// Union of the single-particle cubes C^{(1)}_L(x_i) of every particle of every
/// cube: the points a Hamiltonian on those cubes reads.
std::vector<Site> field_region(std::vector<Cube> const &cubes);

} // namespace wl
