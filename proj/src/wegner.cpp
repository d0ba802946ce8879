#include "wegnerlab/wegner.hpp"

#include "wegnerlab/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace wl {

double distance(double x, Interval const &I)
{
  if (x < I.lo) { return I.lo - x; }
  if (x > I.hi) { return x - I.hi; }
  return 0.0;
}

IntervalUnion::IntervalUnion(std::vector<Interval> intervals)
{
  std::sort(intervals.begin(), intervals.end(), [](Interval const &a, Interval const &b) { return a.lo < b.lo; });
  for (auto const &I : intervals) {
    if (I.lo > I.hi) { continue; }
    if (!parts_.empty() && I.lo <= parts_.back().hi) {
      parts_.back().hi = std::max(parts_.back().hi, I.hi);
    } else {
      parts_.push_back(I);
    }
  }
}

bool IntervalUnion::contains(double x) const
{
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x, [](double v, Interval const &I) { return v < I.lo; });
  return it != parts_.begin() && std::prev(it)->contains(x);
}

double IntervalUnion::total_length() const
{
  double total = 0.0;
  for (auto const &I : parts_) {
    total += I.length();
  }
  return total;
}

IntervalUnion IntervalUnion::intersect(IntervalUnion const &other) const
{
  IntervalUnion out;
  std::size_t   i = 0;
  std::size_t   j = 0;
  while (i < parts_.size() && j < other.parts_.size()) {
    Interval const &a  = parts_[i];
    Interval const &b  = other.parts_[j];
    double const    lo = std::max(a.lo, b.lo);
    double const    hi = std::min(a.hi, b.hi);
    if (lo <= hi) { out.parts_.push_back({lo, hi}); }
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

IntervalUnion IntervalUnion::intersect(Interval const &other) const
{
  return intersect(IntervalUnion(std::vector<Interval>{other}));
}

IntervalUnion fatten(Spectrum const &spectrum, double eps)
{
  std::vector<Interval> parts;
  parts.reserve(static_cast<std::size_t>(spectrum.dim()));
  for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
    parts.push_back({spectrum[k] - eps, spectrum[k] + eps});
  }
  return IntervalUnion(std::move(parts));
}

bool fixed_energy_event(Spectrum const &spectrum, double E, double eps)
{
  return dist_to_spectrum(spectrum, E) <= eps;
}

bool variable_energy_event(Spectrum const &spectrum, Interval const &I0, double eps)
{
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < spectrum.dim(); ++k) {
    best = std::min(best, distance(spectrum[k], I0));
  }
  return best <= eps;
}

bool two_volume_event(Spectrum const &spectrum_x, Spectrum const &spectrum_y, Interval const &I0, double eps)
{
  return !fatten(spectrum_x, eps).intersect(fatten(spectrum_y, eps)).intersect(I0).empty();
}

double resonance_width(double sigma, double L, double beta) { return std::exp(-sigma * std::pow(L, beta)); }

double h_star(double U_norm, double sigma, int L0, double beta)
{
  if (U_norm == 0.0) { return std::numeric_limits<double>::infinity(); }
  return 1.0 / (2.0 * U_norm * std::exp(sigma * std::pow(static_cast<double>(L0), beta)));
}

double delta0(double sigma, int L0, double beta)
{
  return 0.5 * std::exp(-sigma * std::pow(static_cast<double>(L0), beta));
}

std::string PerturbationOutcome::report() const
{
  char const *name = status == Status::pass ? "pass" : status == Status::skipped ? "skipped" : "counterexample";
  char        buf[384];
  std::snprintf(buf, sizeof buf,
                "%s%s%s h=%.6g h*=%.6g |U|=%.6g E=%.12g threshold=%.6g dist0=%.6g dist_h=%.6g |G0|=%.6g |Gh|=%.6g",
                name, clause.empty() ? "" : " clause ", clause.c_str(), h, h_star, U_norm, E, threshold, dist0,
                dist_h, G0, Gh);
  return buf;
}

PerturbationOutcome perturbation_check(Cube const &cube,
                                       FieldSample const &field,
                                       InteractionSpec const &inter,
                                       double h,
                                       double E,
                                       double sigma,
                                       double beta,
                                       int L0)
{
  PerturbationOutcome out;
  out.h         = h;
  out.E         = E;
  out.U_norm    = interaction_sup_norm(cube, inter);
  out.h_star    = h_star(out.U_norm, sigma, L0, beta);
  out.threshold = std::exp(-sigma * std::pow(static_cast<double>(L0), beta));
  if (!(std::abs(h) < out.h_star)) { throw ArgumentError("perturbation_check requires |h| < h*"); }

  SymMatrix const H0 = build_hamiltonian(cube, field, inter, 0.0);
  SymMatrix const Hh = build_hamiltonian(cube, field, inter, h);
  out.dist0          = dist_to_spectrum(H0, E);
  out.dist_h         = dist_to_spectrum(Hh, E);
  if (out.dist0 == 0.0 || out.dist_h == 0.0) {
    out.status = PerturbationOutcome::Status::skipped;
    out.clause = "resolvent diverges at E";
    return out;
  }
  out.G0 = 1.0 / out.dist0;
  out.Gh = 1.0 / out.dist_h;

  // eigenvalue accuracy of the solvers, propagated into the comparisons
  double const accuracy = 1e-12 * (1.0 + std::max(H0.inf_norm(), Hh.inf_norm()));
  double const rel_tol  = 4.0 * (accuracy / out.dist0 + accuracy / out.dist_h) + 1e-12;

  double const rhs = out.G0 + std::abs(h) * out.U_norm * out.G0 * out.Gh;
  if (out.Gh > rhs * (1.0 + rel_tol)) {
    out.status = PerturbationOutcome::Status::counterexample;
    out.clause = "a";
    return out;
  }
  if (out.dist0 > out.threshold && out.dist_h < 0.5 * out.threshold - accuracy) {
    out.status = PerturbationOutcome::Status::counterexample;
    out.clause = "b";
    return out;
  }
  return out;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials)
{
  if (trials <= 0) { throw ArgumentError("wilson_interval needs trials >= 1"); }
  constexpr double z      = 1.959963984540054;
  double const     n      = static_cast<double>(trials);
  double const     p      = static_cast<double>(successes) / n;
  double const     z2n    = z * z / n;
  double const     center = (p + 0.5 * z2n) / (1.0 + z2n);
  double const     half   = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  Interval         ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  ci.lo = std::min(ci.lo, p);
  ci.hi = std::max(ci.hi, p);
  return ci;
}

MCResult make_mc_result(std::int64_t successes, std::int64_t trials)
{
  MCResult r;
  r.trials    = trials;
  r.successes = successes;
  r.p_hat     = static_cast<double>(successes) / static_cast<double>(trials);
  r.ci95      = wilson_interval(successes, trials);
  return r;
}

std::string to_string(EventKind kind)
{
  switch (kind) {
  case EventKind::fixed: return "fixed";
  case EventKind::variable: return "variable";
  case EventKind::two_volume: return "two_volume";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string const &name)
{
  if (name == "fixed") { return EventKind::fixed; }
  if (name == "variable") { return EventKind::variable; }
  if (name == "two_volume") { return EventKind::two_volume; }
  throw ConfigError("unknown event kind '" + name + "' (expected fixed, variable or two_volume)");
}

Cube EventSpec::second_cube() const
{
  Site center = cube.center();
  for (int k = 0; k < center.size(); ++k) {
    center[k] += offset[static_cast<std::size_t>(k)];
  }
  return Cube(center, cube.radius());
}

void validate(EventSpec const &spec)
{
  if (auto violation = wl::validate(spec.distribution)) {
    throw ConfigError("distribution " + describe(spec.distribution) + ": " + violation->clause);
  }
  if (!(spec.eps >= 0.0)) { throw ConfigError("eps must be non-negative"); }
  if (spec.kind != EventKind::fixed && !(spec.I0.lo <= spec.I0.hi)) {
    throw ConfigError("energy interval has lo > hi");
  }
  if (spec.kind == EventKind::two_volume &&
      spec.offset.size() != static_cast<std::size_t>(spec.cube.center().size())) {
    throw ConfigError("two-volume offset must have n*d components");
  }
}

namespace {

bool closed_window_has_eigenvalue(SymMatrix const &H, Interval const &window)
{
  Eigen::Index const below_hi = count_below(H, std::nextafter(window.hi, std::numeric_limits<double>::infinity())).count;
  Eigen::Index const below_lo = count_below(H, window.lo).count;
  return below_hi > below_lo;
}

} // namespace

bool evaluate_event(EventSpec const &spec, std::uint64_t seed, std::uint64_t trial)
{
  validate(spec);
  std::vector<Cube> cubes{spec.cube};
  if (spec.kind == EventKind::two_volume) { cubes.push_back(spec.second_cube()); }
  FieldSample const field = sample_field(spec.distribution, field_region(cubes), seed, trial, Validation::skip);
  SymMatrix const   H     = build_hamiltonian(spec.cube, field, spec.interaction, spec.h);

  switch (spec.kind) {
  case EventKind::fixed:
    if (H.dim() <= SymMatrix::kDenseThreshold) { return fixed_energy_event(full_spectrum(H), spec.E, spec.eps); }
    return dist_by_bisection(H, spec.E) <= spec.eps;
  case EventKind::variable:
    if (H.dim() <= SymMatrix::kDenseThreshold) { return variable_energy_event(full_spectrum(H), spec.I0, spec.eps); }
    return closed_window_has_eigenvalue(H, {spec.I0.lo - spec.eps, spec.I0.hi + spec.eps});
  case EventKind::two_volume: {
    SymMatrix const Hy = build_hamiltonian(cubes[1], field, spec.interaction, spec.h);
    return two_volume_event(full_spectrum(H), full_spectrum(Hy), spec.I0, spec.eps);
  }
  }
  return false;
}

MCResult mc_estimate(EventSpec const &spec, std::int64_t trials, std::uint64_t seed, int workers)
{
  if (trials < 1) { throw ConfigError("trials must be >= 1"); }
  validate(spec);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::min<std::int64_t>(trials, 1024))));

  std::vector<unsigned char> hits(static_cast<std::size_t>(trials), 0);
  std::atomic<std::int64_t>  next{0};
  std::exception_ptr         failure;
  std::mutex                 failure_mutex;
  constexpr std::int64_t     chunk = 16;

  auto work = [&] {
    try {
      while (true) {
        std::int64_t const begin = next.fetch_add(chunk);
        if (begin >= trials) { break; }
        std::int64_t const end = std::min(trials, begin + chunk);
        for (std::int64_t t = begin; t < end; ++t) {
          hits[static_cast<std::size_t>(t)] = evaluate_event(spec, seed, static_cast<std::uint64_t>(t)) ? 1 : 0;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) { failure = std::current_exception(); }
      next.store(trials);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  if (failure) { std::rethrow_exception(failure); }

  std::int64_t successes = 0;
  for (auto hit : hits) {
    successes += hit;
  }
  return make_mc_result(successes, trials);
}

DecayFit decay_fit(std::vector<std::pair<int, MCResult>> const &points, double beta, double q)
{
  if (points.size() < 2) { throw ArgumentError("decay_fit needs at least two points"); }
  DecayFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto const &[L, result] : points) {
    fit.points.push_back({L, result.p_hat});
    fit.passes_polynomial.push_back(result.ci95.hi <= std::pow(static_cast<double>(L), -q));
    if (result.p_hat > 0.0) {
      xs.push_back(std::pow(static_cast<double>(L), beta));
      ys.push_back(-std::log(result.p_hat));
    }
  }
  if (xs.size() >= 2) {
    Eigen::Map<Eigen::VectorXd const> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    Eigen::Map<Eigen::VectorXd const> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    double const sxx = (x.array() - x.mean()).square().sum();
    if (sxx > 0.0) { fit.alpha_hat = ((x.array() - x.mean()) * (y.array() - y.mean())).sum() / sxx; }
  }
  return fit;
}

} // namespace wl
