#pragma once

#include "wegnerlab/hamiltonian.hpp"
#include "wegnerlab/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wl {

/// Closed interval [lo, hi].
struct Interval
{
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(Interval const &) const = default;
};

/// dist(x, I), zero inside.
double distance(double x, Interval const &I);

/// Sorted, pairwise disjoint closed intervals; touching inputs are merged.
class IntervalUnion
{
public:
  IntervalUnion() = default;
  /// Sorts and merges arbitrary closed intervals.
  explicit IntervalUnion(std::vector<Interval> intervals);

  std::vector<Interval> const &intervals() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool contains(double x) const;
  double total_length() const;

  /// Two-pointer sweep over both sorted lists.
  IntervalUnion intersect(IntervalUnion const &other) const;
  IntervalUnion intersect(Interval const &other) const;

private:
  std::vector<Interval> parts_;
};

/// Union of [lambda - eps, lambda + eps] over the spectrum.
IntervalUnion fatten(Spectrum const &spectrum, double eps);

/// dist(E, sigma) <= eps
bool fixed_energy_event(Spectrum const &spectrum, double E, double eps);

/// exists E in I0 with dist(E, sigma) <= eps, i.e. min_lambda dist(lambda, I0) <= eps.
bool variable_energy_event(Spectrum const &spectrum, Interval const &I0, double eps);

/// exists E in I0 with max(dist(E, sigma_x), dist(E, sigma_y)) <= eps.
bool two_volume_event(Spectrum const &spectrum_x, Spectrum const &spectrum_y, Interval const &I0, double eps);

/// e^{-sigma L^beta}
double resonance_width(double sigma, double L, double beta);

/// 1 / (2 |U| e^{sigma L0^beta}); infinity when |U| = 0.
double h_star(double U_norm, double sigma, int L0, double beta);

/// e^{-sigma L0^beta} / 2
double delta0(double sigma, int L0, double beta);

struct PerturbationOutcome
{
  enum class Status
  {
    pass,
    counterexample,
    skipped
  };

  Status      status = Status::pass;
  /// "a" (resolvent norm inequality), "b" (stability of non-resonance), or
  /// the reason for a skip.
  std::string clause;

  double h         = 0.0;
  double E         = 0.0;
  double U_norm    = 0.0;
  double h_star    = 0.0;
  double threshold = 0.0; ///< e^{-sigma L0^beta}
  double dist0     = 0.0;
  double dist_h    = 0.0;
  double G0        = 0.0;
  double Gh        = 0.0;

  std::string report() const;
};

/// Checks, on one sampled instance, the norm bound from the second resolvent
/// identity, |G_h| <= |G_0| + |h||U||G_0||G_h|, and the implication
/// dist(E, sigma(H_0)) > e^{-sigma L0^beta} => dist(E, sigma(H_h)) >= e^{-sigma L0^beta} / 2.
/// Requires |h| < h*; throws ArgumentError otherwise.
PerturbationOutcome perturbation_check(Cube const &cube,
                                       FieldSample const &field,
                                       InteractionSpec const &inter,
                                       double h,
                                       double E,
                                       double sigma,
                                       double beta,
                                       int L0);

struct MCResult
{
  std::int64_t trials    = 0;
  std::int64_t successes = 0;
  double       p_hat     = 0.0;
  Interval     ci95;
};

/// Wilson score interval at 95%, clamped to [0, 1].
Interval wilson_interval(std::int64_t successes, std::int64_t trials);

MCResult make_mc_result(std::int64_t successes, std::int64_t trials);

enum class EventKind
{
  fixed,
  variable,
  two_volume
};

std::string to_string(EventKind kind);
EventKind parse_event_kind(std::string const &name);

/// Everything needed to evaluate one resonance event on a fresh field.
struct EventSpec
{
  EventKind        kind = EventKind::fixed;
  Cube             cube{Site(1, 1), 1};
  /// Second cube's centre minus the first's (two-volume only).
  std::vector<int> offset;
  DistributionSpec distribution = Bernoulli{};
  InteractionSpec  interaction  = NoInteraction{};
  double           h            = 0.0;
  double           E            = 0.0; ///< fixed
  Interval         I0;                 ///< variable, two_volume
  double           eps = 0.0;

  Cube second_cube() const;
};

/// Validates the measure and the event geometry; throws ConfigError.
void validate(EventSpec const &spec);

/// Samples field number `trial` and evaluates the event.
bool evaluate_event(EventSpec const &spec, std::uint64_t seed, std::uint64_t trial);

/// Runs trials 0..trials-1 on `workers` threads. The success count depends
/// only on (spec, trials, seed).
MCResult mc_estimate(EventSpec const &spec, std::int64_t trials, std::uint64_t seed, int workers = 1);

struct DecayFit
{
  struct Point
  {
    int    L     = 0;
    double p_hat = 0.0;
  };
  std::vector<Point>    points;
  /// Slope of -ln p_hat against L^beta; nullopt with fewer than two p_hat > 0.
  std::optional<double> alpha_hat;
  /// ci95.hi <= L^{-q}, one per point.
  std::vector<bool>     passes_polynomial;
};

/// Least-squares fit (with intercept) of -ln p_hat = alpha L^beta + c.
/// Throws ArgumentError with fewer than two points.
DecayFit decay_fit(std::vector<std::pair<int, MCResult>> const &points, double beta, double q);

} // namespace wl
