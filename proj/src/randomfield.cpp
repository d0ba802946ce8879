#include "wegnerlab/randomfield.hpp"

#include "wegnerlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace wl {

namespace {

constexpr double kWeightTolerance = 1e-12;

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool finite_number(double x) { return std::isfinite(x); }

std::string format_number(double x)
{
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace

std::optional<Violation> validate(DistributionSpec const &spec)
{
  struct Visitor
  {
    std::optional<Violation> operator()(Bernoulli const &b) const
    {
      if (!finite_number(b.p) || !finite_number(b.lo) || !finite_number(b.hi)) {
        return Violation{"non-finite parameter"};
      }
      if (b.p < 0.0 || b.p > 1.0) { return Violation{"probability outside [0,1]"}; }
      if (b.p == 0.0 || b.p == 1.0 || b.lo == b.hi) { return Violation{"single-point support"}; }
      return std::nullopt;
    }
    std::optional<Violation> operator()(Uniform const &u) const
    {
      if (!finite_number(u.lo) || !finite_number(u.hi)) { return Violation{"non-finite parameter"}; }
      if (u.lo > u.hi) { return Violation{"empty support (lo > hi)"}; }
      if (u.lo == u.hi) { return Violation{"single-point support"}; }
      return std::nullopt;
    }
    std::optional<Violation> operator()(Finite const &f) const
    {
      if (f.values.empty()) { return Violation{"empty support"}; }
      if (f.values.size() != f.weights.size()) { return Violation{"values and weights differ in length"}; }
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (!finite_number(f.values[i]) || !finite_number(f.weights[i])) {
          return Violation{"non-finite parameter"};
        }
        if (f.weights[i] < 0.0) { return Violation{"negative weight"}; }
      }
      double const total = std::accumulate(f.weights.begin(), f.weights.end(), 0.0);
      if (std::abs(total - 1.0) > kWeightTolerance) { return Violation{"weights do not sum to 1"}; }
      std::set<double> charged;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.weights[i] > 0.0) { charged.insert(f.values[i]); }
      }
      if (charged.size() < 2) { return Violation{"single-point support"}; }
      return std::nullopt;
    }
  };
  return std::visit(Visitor{}, spec);
}

std::string describe(DistributionSpec const &spec)
{
  struct Visitor
  {
    std::string operator()(Bernoulli const &b) const
    {
      return "bernoulli(p=" + format_number(b.p) + ",lo=" + format_number(b.lo) + ",hi=" + format_number(b.hi) + ")";
    }
    std::string operator()(Uniform const &u) const
    {
      return "uniform(lo=" + format_number(u.lo) + ",hi=" + format_number(u.hi) + ")";
    }
    std::string operator()(Finite const &f) const
    {
      std::string out = "finite(";
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (i > 0) { out += ","; }
        out += format_number(f.values[i]) + ":" + format_number(i < f.weights.size() ? f.weights[i] : 0.0);
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, spec);
}

double cdf(DistributionSpec const &spec, double x)
{
  struct Visitor
  {
    double x;
    double operator()(Bernoulli const &b) const
    {
      double result = 0.0;
      if (x >= b.lo) { result += 1.0 - b.p; }
      if (x >= b.hi) { result += b.p; }
      return result;
    }
    double operator()(Uniform const &u) const
    {
      if (x < u.lo) { return 0.0; }
      if (x >= u.hi) { return 1.0; }
      return (x - u.lo) / (u.hi - u.lo);
    }
    double operator()(Finite const &f) const
    {
      double result = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (x >= f.values[i]) { result += f.weights[i]; }
      }
      return result;
    }
  };
  return std::visit(Visitor{x}, spec);
}

std::pair<double, double> support_bounds(DistributionSpec const &spec)
{
  struct Visitor
  {
    std::pair<double, double> operator()(Bernoulli const &b) const
    {
      return {std::min(b.lo, b.hi), std::max(b.lo, b.hi)};
    }
    std::pair<double, double> operator()(Uniform const &u) const { return {u.lo, u.hi}; }
    std::pair<double, double> operator()(Finite const &f) const
    {
      auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
      return {*lo, *hi};
    }
  };
  return std::visit(Visitor{}, spec);
}

double uniform_variate(std::uint64_t seed, std::uint64_t trial, Site const &point)
{
  std::uint64_t key = mix(seed + 0x9e3779b97f4a7c15ULL);
  key               = mix(key ^ (trial * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  key               = mix(key ^ static_cast<std::uint64_t>(point.size()));
  for (int k = 0; k < point.size(); ++k) {
    key = mix(key + static_cast<std::uint64_t>(static_cast<std::int64_t>(point[k])) + 0x9e3779b97f4a7c15ULL);
  }
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

double sample_value(DistributionSpec const &spec, std::uint64_t seed, std::uint64_t trial, Site const &point)
{
  double const u = uniform_variate(seed, trial, point);
  struct Visitor
  {
    double u;
    double operator()(Bernoulli const &b) const { return u < b.p ? b.hi : b.lo; }
    double operator()(Uniform const &un) const { return un.lo + (un.hi - un.lo) * u; }
    double operator()(Finite const &f) const
    {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        acc += f.weights[i];
        if (u < acc) { return f.values[i]; }
      }
      // rounding left u above the last partial sum
      for (std::size_t i = f.values.size(); i-- > 0;) {
        if (f.weights[i] > 0.0) { return f.values[i]; }
      }
      return f.values.back();
    }
  };
  return std::visit(Visitor{u}, spec);
}

void FieldSample::set(Site const &point, double value)
{
  if (point.n() != 1) { throw DimensionError("field points are single-particle sites"); }
  values_[point] = value;
}

double FieldSample::value(Site const &point) const
{
  auto it = values_.find(point);
  if (it == values_.end()) {
    std::string coords;
    for (int k = 0; k < point.size(); ++k) {
      coords += (k ? "," : "") + std::to_string(point[k]);
    }
    throw CoverageError("field has no value at (" + coords + ")");
  }
  return it->second;
}

std::vector<Site> FieldSample::region() const
{
  std::vector<Site> out;
  out.reserve(values_.size());
  for (auto const &[point, _] : values_) {
    out.push_back(point);
  }
  return out;
}

FieldSample sample_field(DistributionSpec const &spec,
                         std::vector<Site> const &region,
                         std::uint64_t seed,
                         std::uint64_t trial,
                         Validation validation)
{
  if (validation == Validation::check) {
    if (auto violation = validate(spec)) {
      throw ConfigError("invalid distribution " + describe(spec) + ": " + violation->clause);
    }
  }
  FieldSample field;
  for (auto const &point : region) {
    field.set(point, sample_value(spec, seed, trial, point));
  }
  return field;
}

std::vector<Site> field_region(std::vector<Cube> const &cubes)
{
  std::set<Site> points;
  for (auto const &cube : cubes) {
    for (int i = 0; i < cube.n(); ++i) {
      for (auto const &p : enumerate_sites(cube.particle_cube(i))) {
        points.insert(p);
      }
    }
  }
  return {points.begin(), points.end()};
}

} // namespace wl
