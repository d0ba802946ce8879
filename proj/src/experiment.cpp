#include "wegnerlab/experiment.hpp"

#include "wegnerlab/errors.hpp"
#include "wegnerlab/transfer.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace wl {

using nlohmann::json;

namespace {

void check_keys(json const &object, std::string const &where, std::set<std::string> const &allowed)
{
  if (!object.is_object()) { throw ConfigError(where + " must be an object"); }
  for (auto const &[key, _] : object.items()) {
    if (!allowed.contains(key)) { throw ConfigError("unknown key '" + key + "' in " + where); }
  }
}

double get_number(json const &object, std::string const &key, std::string const &where)
{
  auto const &v = object.at(key);
  if (!v.is_number()) { throw ConfigError(where + "." + key + " must be a number"); }
  return v.get<double>();
}

std::int64_t get_integer(json const &object, std::string const &key, std::string const &where)
{
  auto const &v = object.at(key);
  if (!v.is_number_integer()) { throw ConfigError(where + "." + key + " must be an integer"); }
  return v.get<std::int64_t>();
}

std::vector<int> get_int_list(json const &object, std::string const &key, std::string const &where)
{
  auto const &v = object.at(key);
  if (!v.is_array()) { throw ConfigError(where + "." + key + " must be an array of integers"); }
  std::vector<int> out;
  for (auto const &item : v) {
    if (!item.is_number_integer()) { throw ConfigError(where + "." + key + " must be an array of integers"); }
    out.push_back(item.get<int>());
  }
  return out;
}

std::vector<double> get_number_list(json const &object, std::string const &key, std::string const &where)
{
  auto const &v = object.at(key);
  if (!v.is_array()) { throw ConfigError(where + "." + key + " must be an array of numbers"); }
  std::vector<double> out;
  for (auto const &item : v) {
    if (!item.is_number()) { throw ConfigError(where + "." + key + " must be an array of numbers"); }
    out.push_back(item.get<double>());
  }
  return out;
}

DistributionSpec parse_distribution(json const &j)
{
  std::string const where = "model.distribution";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(where + " needs a string 'kind'");
  }
  auto const kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli") {
    check_keys(j, where, {"kind", "p", "lo", "hi"});
    Bernoulli b;
    if (j.contains("p")) { b.p = get_number(j, "p", where); }
    if (j.contains("lo")) { b.lo = get_number(j, "lo", where); }
    if (j.contains("hi")) { b.hi = get_number(j, "hi", where); }
    return b;
  }
  if (kind == "uniform") {
    check_keys(j, where, {"kind", "lo", "hi"});
    return Uniform{get_number(j, "lo", where), get_number(j, "hi", where)};
  }
  if (kind == "finite") {
    check_keys(j, where, {"kind", "values", "weights"});
    return Finite{get_number_list(j, "values", where), get_number_list(j, "weights", where)};
  }
  throw ConfigError("unknown distribution kind '" + kind + "' (expected bernoulli, uniform or finite)");
}

json distribution_json(DistributionSpec const &spec)
{
  struct Visitor
  {
    json operator()(Bernoulli const &b) const { return {{"kind", "bernoulli"}, {"p", b.p}, {"lo", b.lo}, {"hi", b.hi}}; }
    json operator()(Uniform const &u) const { return {{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}}; }
    json operator()(Finite const &f) const { return {{"kind", "finite"}, {"values", f.values}, {"weights", f.weights}}; }
  };
  return std::visit(Visitor{}, spec);
}

InteractionSpec parse_interaction(json const &j)
{
  std::string const where = "model.interaction";
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(where + " needs a string 'kind'");
  }
  auto const kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    check_keys(j, where, {"kind"});
    return NoInteraction{};
  }
  if (kind == "pair_contact") {
    check_keys(j, where, {"kind", "range", "amplitude"});
    PairContact pc;
    pc.range     = static_cast<int>(get_integer(j, "range", where));
    pc.amplitude = get_number(j, "amplitude", where);
    if (pc.range < 0) { throw ConfigError(where + ".range must be non-negative"); }
    return pc;
  }
  throw ConfigError("unknown interaction kind '" + kind + "' (expected none or pair_contact)");
}

json interaction_json(InteractionSpec const &inter)
{
  if (auto const *pc = std::get_if<PairContact>(&inter)) {
    return {{"kind", "pair_contact"}, {"range", pc->range}, {"amplitude", pc->amplitude}};
  }
  return {{"kind", "none"}};
}

std::string format_number(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

ExperimentConfig parse_config(std::string const &text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (json::parse_error const &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(doc, "config", {"model", "wegner", "run", "lyapunov"});
    ExperimentConfig c;

    if (doc.contains("model")) {
      auto const &m = doc.at("model");
      check_keys(m, "model", {"n", "d", "L_list", "center", "distribution", "interaction", "h"});
      if (m.contains("n")) { c.model.n = static_cast<int>(get_integer(m, "n", "model")); }
      if (m.contains("d")) { c.model.d = static_cast<int>(get_integer(m, "d", "model")); }
      if (m.contains("L_list")) { c.model.L_list = get_int_list(m, "L_list", "model"); }
      if (m.contains("center")) { c.model.center = get_int_list(m, "center", "model"); }
      if (m.contains("distribution")) { c.model.distribution = parse_distribution(m.at("distribution")); }
      if (m.contains("interaction")) { c.model.interaction = parse_interaction(m.at("interaction")); }
      if (m.contains("h")) { c.model.h = get_number(m, "h", "model"); }
    }

    if (doc.contains("wegner")) {
      auto const &w = doc.at("wegner");
      check_keys(w, "wegner", {"beta", "sigma", "L0", "q", "E0", "interval", "half_width"});
      if (w.contains("beta")) { c.wegner.beta = get_number(w, "beta", "wegner"); }
      if (w.contains("sigma")) { c.wegner.sigma = get_number(w, "sigma", "wegner"); }
      if (w.contains("L0")) { c.wegner.L0 = static_cast<int>(get_integer(w, "L0", "wegner")); }
      if (w.contains("q")) { c.wegner.q = get_number(w, "q", "wegner"); }
      if (w.contains("E0")) { c.wegner.E0 = get_number(w, "E0", "wegner"); }
      if (w.contains("interval")) {
        auto const bounds = get_number_list(w, "interval", "wegner");
        if (bounds.size() != 2) { throw ConfigError("wegner.interval must be [lo, hi]"); }
        c.wegner.interval = Interval{bounds[0], bounds[1]};
      }
      if (w.contains("half_width")) {
        auto const &hw = w.at("half_width");
        if (hw.is_string() && hw.get<std::string>() == "delta0") {
          c.wegner.half_width_delta0 = true;
        } else if (hw.is_number()) {
          c.wegner.half_width = hw.get<double>();
        } else {
          throw ConfigError("wegner.half_width must be a number or \"delta0\"");
        }
      }
    }

    if (doc.contains("run")) {
      auto const &r = doc.at("run");
      check_keys(r, "run", {"event_kind", "trials", "seed", "workers", "offset"});
      if (r.contains("event_kind")) {
        if (!r.at("event_kind").is_string()) { throw ConfigError("run.event_kind must be a string"); }
        c.run.event_kind = parse_event_kind(r.at("event_kind").get<std::string>());
      }
      if (r.contains("trials")) { c.run.trials = get_integer(r, "trials", "run"); }
      if (r.contains("seed")) {
        if (!r.at("seed").is_number_unsigned()) { throw ConfigError("run.seed must be a non-negative integer"); }
        c.run.seed = r.at("seed").get<std::uint64_t>();
      }
      if (r.contains("workers")) { c.run.workers = static_cast<int>(get_integer(r, "workers", "run")); }
      if (r.contains("offset")) { c.run.offset = get_int_list(r, "offset", "run"); }
    }

    if (doc.contains("lyapunov")) {
      auto const &l = doc.at("lyapunov");
      check_keys(l, "lyapunov", {"energies", "E_min", "E_max", "count", "steps"});
      if (l.contains("energies")) { c.lyapunov.energies = get_number_list(l, "energies", "lyapunov"); }
      if (l.contains("E_min") || l.contains("E_max") || l.contains("count")) {
        if (l.contains("energies")) { throw ConfigError("lyapunov: give either energies or E_min/E_max/count"); }
        double const       lo    = get_number(l, "E_min", "lyapunov");
        double const       hi    = get_number(l, "E_max", "lyapunov");
        std::int64_t const count = get_integer(l, "count", "lyapunov");
        if (count < 1) { throw ConfigError("lyapunov.count must be >= 1"); }
        for (std::int64_t k = 0; k < count; ++k) {
          c.lyapunov.energies.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1));
        }
      }
      if (l.contains("steps")) { c.lyapunov.steps = get_integer(l, "steps", "lyapunov"); }
    }
    return c;
  } catch (json::exception const &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw ConfigError("cannot read config file '" + path + "'"); }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(ExperimentConfig const &c)
{
  json model = {{"n", c.model.n},
                {"d", c.model.d},
                {"L_list", c.model.L_list},
                {"distribution", distribution_json(c.model.distribution)},
                {"interaction", interaction_json(c.model.interaction)},
                {"h", c.model.h}};
  if (!c.model.center.empty()) { model["center"] = c.model.center; }

  json wegner = {{"beta", c.wegner.beta},
                 {"sigma", c.wegner.sigma},
                 {"L0", c.wegner.L0},
                 {"q", c.wegner.q},
                 {"E0", c.wegner.E0}};
  if (c.wegner.interval) { wegner["interval"] = {c.wegner.interval->lo, c.wegner.interval->hi}; }
  if (c.wegner.half_width_delta0) {
    wegner["half_width"] = "delta0";
  } else if (c.wegner.half_width) {
    wegner["half_width"] = *c.wegner.half_width;
  }

  json run = {{"event_kind", to_string(c.run.event_kind)},
              {"trials", c.run.trials},
              {"seed", c.run.seed},
              {"workers", c.run.workers}};
  if (c.run.offset) { run["offset"] = *c.run.offset; }

  json lyap = {{"energies", c.lyapunov.energies}, {"steps", c.lyapunov.steps}};
  json doc  = {{"model", model}, {"wegner", wegner}, {"run", run}, {"lyapunov", lyap}};
  return doc.dump(2) + "\n";
}

std::vector<std::string> validate_config(ExperimentConfig const &c)
{
  std::vector<std::string> warnings;
  if (c.model.n < 1) { throw ConfigError("model.n must be >= 1"); }
  if (c.model.d < 1) { throw ConfigError("model.d must be >= 1"); }
  if (c.model.L_list.empty()) { throw ConfigError("model.L_list must not be empty"); }
  for (int L : c.model.L_list) {
    if (L < 1) { throw ConfigError("every L in model.L_list must be >= 1"); }
  }
  if (!c.model.center.empty() && c.model.center.size() != static_cast<std::size_t>(c.model.n * c.model.d)) {
    throw ConfigError("model.center must have n*d components");
  }
  if (auto violation = validate(c.model.distribution)) {
    throw ConfigError("model.distribution " + describe(c.model.distribution) + ": " + violation->clause);
  }
  if (!(c.wegner.beta > 0.0 && c.wegner.beta < 1.0)) { throw ConfigError("wegner.beta must lie in (0,1)"); }
  if (!(c.wegner.sigma > 0.0)) { throw ConfigError("wegner.sigma must be positive"); }
  if (c.wegner.L0 < 1) { throw ConfigError("wegner.L0 must be >= 1"); }
  if (!(c.wegner.q > 0.0)) { throw ConfigError("wegner.q must be positive"); }
  if (c.wegner.interval && !(c.wegner.interval->lo <= c.wegner.interval->hi)) {
    throw ConfigError("wegner.interval has lo > hi");
  }
  if (c.wegner.half_width && !(*c.wegner.half_width >= 0.0)) {
    throw ConfigError("wegner.half_width must be non-negative");
  }
  if (c.run.trials < 1) { throw ConfigError("run.trials must be >= 1"); }
  if (c.run.workers < 1) { throw ConfigError("run.workers must be >= 1"); }
  if (c.run.offset && c.run.offset->size() != static_cast<std::size_t>(c.model.n * c.model.d)) {
    throw ConfigError("run.offset must have n*d components");
  }
  if (c.lyapunov.steps < 1000) { throw ConfigError("lyapunov.steps must be >= 1000"); }

  if (c.model.d != 1) { warnings.push_back("d = " + std::to_string(c.model.d) + ": the bounds under test are stated for d = 1"); }
  if (c.model.h != 0.0) {
    for (int L : c.model.L_list) {
      Cube const   cube(Site(c.model.n, c.model.d), L);
      double const limit = h_star(interaction_sup_norm(cube, c.model.interaction), c.wegner.sigma, c.wegner.L0, c.wegner.beta);
      if (!(std::abs(c.model.h) < limit)) {
        warnings.push_back("L = " + std::to_string(L) + ": |h| = " + format_number(std::abs(c.model.h)) +
                           " is not below h* = " + format_number(limit));
      }
    }
  }
  return warnings;
}

EventSpec event_for(ExperimentConfig const &c, int L)
{
  std::vector<int> center = c.model.center;
  if (center.empty()) { center.assign(static_cast<std::size_t>(c.model.n * c.model.d), 0); }

  EventSpec spec;
  spec.kind         = c.run.event_kind;
  spec.cube         = Cube(Site(c.model.n, c.model.d, center), L);
  spec.distribution = c.model.distribution;
  spec.interaction  = c.model.interaction;
  spec.h            = c.model.h;
  spec.E            = c.wegner.E0;
  spec.eps          = resonance_width(c.wegner.sigma, L, c.wegner.beta);

  if (c.wegner.interval) {
    spec.I0 = *c.wegner.interval;
  } else {
    double half = 0.0;
    if (c.wegner.half_width_delta0) {
      half = delta0(c.wegner.sigma, L, c.wegner.beta);
    } else if (c.wegner.half_width) {
      half = *c.wegner.half_width;
    }
    spec.I0 = {c.wegner.E0 - half, c.wegner.E0 + half};
  }
  if (spec.kind == EventKind::fixed) { spec.I0 = {spec.E, spec.E}; }

  if (c.run.offset) {
    spec.offset = *c.run.offset;
  } else {
    spec.offset.assign(center.size(), 2 * L + 1);
  }
  return spec;
}

std::vector<ResultRow> run_campaign(ExperimentConfig const &c)
{
  validate_config(c);
  std::vector<ResultRow> rows;
  for (int L : c.model.L_list) {
    EventSpec const spec  = event_for(c, L);
    auto const      start = std::chrono::steady_clock::now();

    ResultRow row;
    row.event_kind   = c.run.event_kind;
    row.n            = c.model.n;
    row.d            = c.model.d;
    row.L            = L;
    row.distribution = describe(c.model.distribution);
    row.interaction  = describe(c.model.interaction);
    row.h            = c.model.h;
    row.beta         = c.wegner.beta;
    row.sigma        = c.wegner.sigma;
    row.L0           = c.wegner.L0;
    row.q            = c.wegner.q;
    row.E0           = c.wegner.E0;
    row.window       = spec.I0;
    row.eps          = spec.eps;
    row.seed         = c.run.seed;
    row.result       = mc_estimate(spec, c.run.trials, c.run.seed, c.run.workers);
    row.threshold    = std::pow(static_cast<double>(L), -c.wegner.q);
    row.pass         = row.result.ci95.hi <= row.threshold;
    row.wall_time    = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(std::string const &value)
{
  if (value.find_first_of(",\"\r\n") == std::string::npos) { return value; }
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') { out += '"'; }
    out += ch;
  }
  return out + "\"";
}

void write_results_csv(std::ostream &os, std::vector<ResultRow> const &rows, bool with_timing)
{
  os << "schema,event_kind,n,d,L,distribution,interaction,h,beta,sigma,L0,q,E0,I_lo,I_hi,eps,seed,trials,"
        "successes,p_hat,ci_lo,ci_hi,threshold,pass";
  if (with_timing) { os << ",wall_time_s"; }
  os << "\r\n";
  for (auto const &r : rows) {
    os << kCsvSchemaVersion << ',' << to_string(r.event_kind) << ',' << r.n << ',' << r.d << ',' << r.L << ','
       << csv_field(r.distribution) << ',' << csv_field(r.interaction) << ',' << format_number(r.h) << ','
       << format_number(r.beta) << ',' << format_number(r.sigma) << ',' << r.L0 << ',' << format_number(r.q) << ','
       << format_number(r.E0) << ',' << format_number(r.window.lo) << ',' << format_number(r.window.hi) << ','
       << format_number(r.eps) << ',' << r.seed << ',' << r.result.trials << ',' << r.result.successes << ','
       << format_number(r.result.p_hat) << ',' << format_number(r.result.ci95.lo) << ','
       << format_number(r.result.ci95.hi) << ',' << format_number(r.threshold) << ',' << (r.pass ? "true" : "false");
    if (with_timing) { os << ',' << format_number(r.wall_time); }
    os << "\r\n";
  }
}

std::vector<SweepRow> lyapunov_sweep(ExperimentConfig const &c)
{
  if (c.model.d != 1) { throw ConfigError("lyapunov-sweep requires d = 1"); }
  if (c.lyapunov.energies.empty()) { throw ConfigError("lyapunov-sweep needs lyapunov.energies or E_min/E_max/count"); }
  if (c.lyapunov.steps < 1000) { throw ConfigError("lyapunov.steps must be >= 1000"); }

  std::vector<SweepRow> rows(c.lyapunov.energies.size());
  auto one = [&](std::size_t k) {
    // common random numbers across energies: every point reads trial 0
    auto const est = lyapunov(c.lyapunov.energies[k], c.model.distribution, c.lyapunov.steps, c.run.seed, 0);
    rows[k]        = {c.lyapunov.energies[k], est.gamma, est.stderr_};
  };
  int const workers = std::max(1, std::min<int>(c.run.workers, static_cast<int>(rows.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      one(k);
    }
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < rows.size(); k += static_cast<std::size_t>(workers)) {
          one(k);
        }
      });
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream &os, std::vector<SweepRow> const &rows)
{
  os << "E,gamma_hat,stderr\r\n";
  for (auto const &r : rows) {
    os << format_number(r.E) << ',' << format_number(r.gamma) << ',' << format_number(r.stderr_) << "\r\n";
  }
}

SymMatrix config_hamiltonian(ExperimentConfig const &c)
{
  validate_config(c);
  EventSpec const   spec  = event_for(c, c.model.L_list.front());
  FieldSample const field = sample_field(spec.distribution, field_region({spec.cube}), c.run.seed, 0);
  return build_hamiltonian(spec.cube, field, spec.interaction, spec.h);
}

} // namespace wl
