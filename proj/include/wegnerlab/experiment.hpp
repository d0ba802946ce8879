#pragma once

#include "wegnerlab/hamiltonian.hpp"
#include "wegnerlab/randomfield.hpp"
#include "wegnerlab/wegner.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wl {

inline constexpr int kCsvSchemaVersion = 1;

struct ModelConfig
{
  int              n = 1;
  int              d = 1;
  std::vector<int> L_list{8};
  /// Defaults to the origin.
  std::vector<int> center;
  DistributionSpec distribution = Bernoulli{};
  InteractionSpec  interaction  = NoInteraction{};
  double           h            = 0.0;
  bool operator==(ModelConfig const &) const = default;
};

struct WegnerConfig
{
  double beta  = 0.5;
  double sigma = 1.0;
  int    L0    = 1;
  double q     = 2.0;
  double E0    = 0.0;
  /// Energy window for variable and two-volume events: an explicit interval,
  /// a fixed half-width around E0, or half-width delta0(sigma, L, beta) per L.
  std::optional<Interval> interval;
  std::optional<double>   half_width;
  bool                    half_width_delta0 = false;
  bool operator==(WegnerConfig const &) const = default;
};

struct RunConfig
{
  EventKind        event_kind = EventKind::fixed;
  std::int64_t     trials     = 1000;
  std::uint64_t    seed       = 0;
  int              workers    = 1;
  /// Two-volume centre offset; default (2L+1, ..., 2L+1) per L, so the
  /// single-particle projections of the two cubes are disjoint.
  std::optional<std::vector<int>> offset;
  bool operator==(RunConfig const &) const = default;
};

struct LyapunovConfig
{
  std::vector<double> energies;
  std::int64_t        steps = 1000000;
  bool operator==(LyapunovConfig const &) const = default;
};

struct ExperimentConfig
{
  ModelConfig    model;
  WegnerConfig   wegner;
  RunConfig      run;
  LyapunovConfig lyapunov;
  bool operator==(ExperimentConfig const &) const = default;
};

/// Parses the JSON config document. Throws ConfigError with a readable
/// message on malformed input, unknown keys, or out-of-range values.
ExperimentConfig parse_config(std::string const &text);
ExperimentConfig load_config(std::string const &path);
std::string serialize_config(ExperimentConfig const &config);

/// Structural and measure-support checks; throws ConfigError. Returns
/// non-fatal warnings (e.g. d != 1, |h| >= h*).
std::vector<std::string> validate_config(ExperimentConfig const &config);

/// The event evaluated for one entry of L_list.
EventSpec event_for(ExperimentConfig const &config, int L);

struct ResultRow
{
  EventKind     event_kind = EventKind::fixed;
  int           n = 1;
  int           d = 1;
  int           L = 1;
  std::string   distribution;
  std::string   interaction;
  double        h     = 0.0;
  double        beta  = 0.0;
  double        sigma = 0.0;
  int           L0    = 1;
  double        q     = 0.0;
  double        E0    = 0.0;
  Interval      window;
  double        eps  = 0.0;
  std::uint64_t seed = 0;
  MCResult      result;
  double        threshold = 0.0;
  bool          pass      = false;
  double        wall_time = 0.0;
};

/// One row per L: Monte Carlo estimate and the check ci95.hi <= L^{-q}.
std::vector<ResultRow> run_campaign(ExperimentConfig const &config);

/// RFC 4180 quoting: fields containing ',', '"', CR or LF are quoted.
std::string csv_field(std::string const &value);

/// Header plus rows. Wall time is an extra trailing column only when
/// `with_timing` is set, since it breaks byte-for-byte reproducibility.
void write_results_csv(std::ostream &os, std::vector<ResultRow> const &rows, bool with_timing = false);

struct SweepRow
{
  double E      = 0.0;
  double gamma  = 0.0;
  double stderr_ = 0.0;
};

/// Lyapunov exponent over config.lyapunov.energies, with the model's
/// distribution (not validated) and run seed.
std::vector<SweepRow> lyapunov_sweep(ExperimentConfig const &config);
void write_sweep_csv(std::ostream &os, std::vector<SweepRow> const &rows);

/// Hamiltonian for the first L of the config on field trial 0.
SymMatrix config_hamiltonian(ExperimentConfig const &config);

struct SuiteReport
{
  std::string name;
  bool        passed = false;
  double      worst  = 0.0; ///< worst deviation, or violation count
  std::string detail;
};

struct VerifyOptions
{
  /// Empty runs every suite.
  std::string   suite;
  std::uint64_t seed = 20240601;
  /// Flips the sign of one hopping pair of the direct operator in the tensor
  /// suite, which must then fail.
  bool inject_fault = false;
};

std::vector<std::string> verify_suite_names();
std::vector<SuiteReport> verify(VerifyOptions const &options);

} // namespace wl
