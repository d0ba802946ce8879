#include "wegnerlab/errors.hpp"
#include "wegnerlab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// Writes the whole payload at once so a failure never leaves partial output.
int emit(std::string const &path, std::string const &payload)
{
  if (path.empty() || path == "-") {
    std::cout << payload;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 2;
  }
  out << payload;
  return out ? 0 : 2;
}

struct Common
{
  std::string              config_path;
  std::string              out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int>       workers;
};

wl::ExperimentConfig load(Common const &common)
{
  auto config = wl::load_config(common.config_path);
  if (common.seed) { config.run.seed = *common.seed; }
  if (common.workers) { config.run.workers = *common.workers; }
  return config;
}

void add_common(CLI::App *cmd, Common &common, bool needs_config)
{
  auto *opt = cmd->add_option("--config", common.config_path, "Experiment config (JSON)");
  if (needs_config) { opt->required()->check(CLI::ExistingFile); }
  cmd->add_option("--out", common.out_path, "Output path (default: stdout)");
  cmd->add_option("--seed", common.seed, "Override run.seed");
  cmd->add_option("--workers", common.workers, "Override run.workers")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Finite-volume multi-particle Bernoulli-Anderson Hamiltonians: spectra and resonance probabilities"};
  app.require_subcommand(1);

  Common run_opts;
  bool   timing = false;
  auto  *run    = app.add_subcommand("run", "Monte Carlo resonance-probability campaign, one CSV row per L");
  add_common(run, run_opts, true);
  run->add_flag("--timing", timing, "Append a wall_time_s column (output is then not reproducible)");

  Common      verify_opts;
  std::string suite;
  bool        inject_fault = false;
  auto       *verify       = app.add_subcommand("verify", "Run the oracle and invariant suites");
  add_common(verify, verify_opts, false);
  verify->add_option("--suite", suite, "Run a single suite")->check(CLI::IsMember(wl::verify_suite_names()));
  verify->add_flag("--inject-fault", inject_fault, "Corrupt one hopping sign in the tensor suite");

  Common sweep_opts;
  auto  *sweep = app.add_subcommand("lyapunov-sweep", "Lyapunov exponent over an energy grid, CSV E,gamma_hat,stderr");
  add_common(sweep, sweep_opts, true);

  Common dump_opts;
  auto  *dump = app.add_subcommand("dump-matrix", "Write the Hamiltonian for the first L (field trial 0)");
  add_common(dump, dump_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto const config = load(run_opts);
      for (auto const &warning : wl::validate_config(config)) {
        std::cerr << "warning: " << warning << "\n";
      }
      auto const         rows = wl::run_campaign(config);
      std::ostringstream csv;
      wl::write_results_csv(csv, rows, timing);
      if (int rc = emit(run_opts.out_path, csv.str()); rc != 0) { return rc; }
      bool all_pass = true;
      for (auto const &row : rows) {
        std::cerr << "L=" << row.L << " successes=" << row.result.successes << "/" << row.result.trials
                  << " ci95_hi=" << row.result.ci95.hi << " threshold=" << row.threshold
                  << (row.pass ? " pass" : " FAIL") << "\n";
        all_pass = all_pass && row.pass;
      }
      return all_pass ? 0 : 1;
    }
    if (verify->parsed()) {
      wl::VerifyOptions options;
      options.suite        = suite;
      options.inject_fault = inject_fault;
      if (verify_opts.seed) { options.seed = *verify_opts.seed; }
      auto const         reports = wl::verify(options);
      std::ostringstream text;
      bool               all_pass = true;
      for (auto const &r : reports) {
        text << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.passed;
      }
      if (int rc = emit(verify_opts.out_path, text.str()); rc != 0) { return rc; }
      return all_pass ? 0 : 1;
    }
    if (sweep->parsed()) {
      auto const         config = load(sweep_opts);
      std::ostringstream csv;
      wl::write_sweep_csv(csv, wl::lyapunov_sweep(config));
      return emit(sweep_opts.out_path, csv.str());
    }
    if (dump->parsed()) {
      auto const         config = load(dump_opts);
      std::ostringstream text;
      wl::write_matrix(text, wl::config_hamiltonian(config));
      return emit(dump_opts.out_path, text.str());
    }
  } catch (wl::ConfigError const &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
