#include "wegnerlab/errors.hpp"
#include "wegnerlab/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace wl;
namespace fs = std::filesystem;

namespace {

std::string const kFixedConfig = R"({
  "model": {"n": 1, "d": 1, "L_list": [4, 6],
            "distribution": {"kind": "bernoulli", "p": 0.5, "lo": 0, "hi": 1},
            "interaction": {"kind": "none"}, "h": 0},
  "wegner": {"beta": 0.5, "sigma": 1.0, "L0": 1, "q": 1, "E0": 2.0},
  "run": {"event_kind": "fixed", "trials": 400, "seed": 7, "workers": 1}
})";

fs::path scratch(std::string const &name)
{
  fs::path dir = fs::temp_directory_path() / "wegnerlab_test_experiment";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(fs::path const &path, std::string const &text) { std::ofstream(path, std::ios::binary) << text; }

std::string read_file(fs::path const &path)
{
  std::ifstream      in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(std::string const &args)
{
  std::string const command = std::string(WEGNERLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  int const         status  = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig random_config(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ExperimentConfig                       c;
  c.model.n      = 1 + static_cast<int>(u(rng) * 3);
  c.model.d      = 1 + static_cast<int>(u(rng) * 2);
  c.model.L_list = {1 + static_cast<int>(u(rng) * 5), 2 + static_cast<int>(u(rng) * 9)};
  if (u(rng) < 0.5) { c.model.center.assign(static_cast<std::size_t>(c.model.n * c.model.d), -3); }
  switch (static_cast<int>(u(rng) * 3)) {
  case 0: c.model.distribution = Bernoulli{u(rng), -u(rng), 1.0 + u(rng)}; break;
  case 1: c.model.distribution = Uniform{-u(rng), u(rng) + 0.1}; break;
  default: c.model.distribution = Finite{{0.0, 0.1 + u(rng), 5.0}, {0.125, 0.375, 0.5}}; break;
  }
  if (u(rng) < 0.5) { c.model.interaction = PairContact{static_cast<int>(u(rng) * 3), u(rng) - 0.5}; }
  c.model.h         = u(rng) * 1e-3;
  c.wegner.beta     = 0.1 + 0.8 * u(rng);
  c.wegner.sigma    = 0.1 + u(rng);
  c.wegner.L0       = 1 + static_cast<int>(u(rng) * 10);
  c.wegner.q        = 0.5 + 3.0 * u(rng);
  c.wegner.E0       = 10.0 * u(rng) - 2.0;
  double const mode = u(rng);
  if (mode < 0.33) {
    c.wegner.interval = Interval{1.0 / 3.0, 2.5};
  } else if (mode < 0.66) {
    c.wegner.half_width = u(rng);
  } else {
    c.wegner.half_width_delta0 = true;
  }
  c.run.event_kind = static_cast<EventKind>(static_cast<int>(u(rng) * 3));
  c.run.trials     = 1 + static_cast<std::int64_t>(u(rng) * 1e6);
  c.run.seed       = rng();
  c.run.workers    = 1 + static_cast<int>(u(rng) * 8);
  if (u(rng) < 0.5) { c.run.offset = std::vector<int>(static_cast<std::size_t>(c.model.n * c.model.d), 2); }
  c.lyapunov.energies = {u(rng), 0.1, 1e-17};
  c.lyapunov.steps    = 1000 + static_cast<std::int64_t>(u(rng) * 1e6);
  return c;
}

} // namespace

TEST_CASE("config round trip")
{
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    auto const c    = random_config(rng);
    auto const text = serialize_config(c);
    CHECK(parse_config(text) == c);
    CHECK(serialize_config(parse_config(text)) == text);
  }
  auto const parsed = parse_config(kFixedConfig);
  CHECK(parse_config(serialize_config(parsed)) == parsed);
}

TEST_CASE("config parsing details")
{
  auto const c = parse_config(R"({"model": {"L_list": [2]}, "wegner": {"half_width": "delta0"},
                                  "lyapunov": {"E_min": 0, "E_max": 4, "count": 5}})");
  CHECK(c.wegner.half_width_delta0);
  CHECK(c.lyapunov.energies == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
  CHECK(std::holds_alternative<Bernoulli>(c.model.distribution));

  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"modle": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"n": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": {"distribution": {"kind": "gaussian"}}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"event_kind": "sometimes"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"seed": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"wegner": {"interval": [1]}})"), ConfigError);
}

TEST_CASE("validate_config")
{
  auto c = parse_config(kFixedConfig);
  CHECK(validate_config(c).empty());

  c.model.distribution = Bernoulli{1.0, 0.0, 1.0};
  try {
    validate_config(c);
    FAIL("expected a ConfigError");
  } catch (ConfigError const &e) {
    CHECK(std::string(e.what()).find("single-point support") != std::string::npos);
  }

  c = parse_config(kFixedConfig);
  c.model.L_list = {0};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse_config(kFixedConfig);
  c.wegner.beta = 1.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = parse_config(kFixedConfig);
  c.run.offset = std::vector<int>{1, 2};
  CHECK_THROWS_AS(validate_config(c), ConfigError);

  c         = parse_config(kFixedConfig);
  c.model.d = 2;
  CHECK(validate_config(c).size() == 1);
  c                   = parse_config(kFixedConfig);
  c.model.n           = 2;
  c.model.interaction = PairContact{0, 1.0};
  c.model.h           = 1.0;
  CHECK(validate_config(c).size() == 2); // |h| >= h* for each L
}

TEST_CASE("event_for")
{
  auto c             = parse_config(kFixedConfig);
  c.model.n          = 2;
  c.run.event_kind   = EventKind::two_volume;
  c.wegner.half_width_delta0 = true;
  c.wegner.E0        = 4.0;
  auto const spec    = event_for(c, 3);
  CHECK(spec.eps == doctest::Approx(std::exp(-std::sqrt(3.0))));
  CHECK(spec.I0.lo == doctest::Approx(4.0 - delta0(1.0, 3, 0.5)));
  CHECK(spec.I0.hi == doctest::Approx(4.0 + delta0(1.0, 3, 0.5)));
  CHECK(spec.offset == std::vector<int>{7, 7});
  CHECK(spec.second_cube().center() == Site(2, 1, {7, 7}));

  c.run.offset = std::vector<int>{1, 1};
  CHECK(event_for(c, 3).offset == std::vector<int>{1, 1});
  c.run.event_kind = EventKind::fixed;
  CHECK(event_for(c, 3).I0 == Interval{4.0, 4.0});
}

TEST_CASE("CSV quoting")
{
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("campaign rows and worker invariance")
{
  auto c        = parse_config(kFixedConfig);
  auto rows_one = run_campaign(c);
  c.run.workers = 4;
  auto rows_four = run_campaign(c);
  REQUIRE(rows_one.size() == 2);
  std::ostringstream a;
  std::ostringstream b;
  write_results_csv(a, rows_one);
  write_results_csv(b, rows_four);
  CHECK(a.str() == b.str());

  auto const &row = rows_one[0];
  CHECK(row.L == 4);
  CHECK(row.result.trials == 400);
  CHECK(row.threshold == 0.25);
  CHECK(row.pass == (row.result.ci95.hi <= 0.25));
  CHECK(a.str().find("\"bernoulli(p=0.5,lo=0,hi=1)\"") != std::string::npos);
  CHECK(a.str().rfind("schema,event_kind,n,d,L,", 0) == 0);

  std::ostringstream timed;
  write_results_csv(timed, rows_one, true);
  CHECK(timed.str().find(",wall_time_s\r\n") != std::string::npos);
}

TEST_CASE("lyapunov sweep")
{
  auto c              = parse_config(kFixedConfig);
  c.model.distribution = Finite{{0.0}, {1.0}};
  c.lyapunov.energies  = {2.0, 5.0};
  c.lyapunov.steps     = 100000;
  c.run.workers        = 2;
  auto const rows      = lyapunov_sweep(c);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].gamma) <= 5e-3);
  CHECK(rows[1].gamma == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-3));
  c.model.d = 2;
  CHECK_THROWS_AS(lyapunov_sweep(c), ConfigError);
}

TEST_CASE("verify suites")
{
  auto const reports = verify({});
  REQUIRE(reports.size() == verify_suite_names().size());
  for (auto const &r : reports) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
  VerifyOptions faulty;
  faulty.suite        = "tensor";
  faulty.inject_fault = true;
  auto const broken   = verify(faulty);
  REQUIRE(broken.size() == 1);
  CHECK_FALSE(broken[0].passed);
  CHECK_THROWS_AS(verify({"nonsense", 1, false}), ArgumentError);
}

TEST_CASE("command line: run is byte-identical across worker counts")
{
  auto const config = scratch("fixed.json");
  write_file(config, kFixedConfig);
  auto const out1 = scratch("r1.csv");
  auto const out4 = scratch("r4.csv");
  int const  rc1  = cli("run --config " + config.string() + " --out " + out1.string() + " --seed 7 --workers 1");
  int const  rc4  = cli("run --config " + config.string() + " --out " + out4.string() + " --seed 7 --workers 4");
  CHECK((rc1 == 0 || rc1 == 1));
  CHECK(rc1 == rc4);
  CHECK(read_file(out1) == read_file(out4));
  CHECK_FALSE(read_file(out1).empty());
}

TEST_CASE("command line: invalid config exits non-zero without output")
{
  auto const config = scratch("bad.json");
  write_file(config, R"({"model": {"distribution": {"kind": "bernoulli", "p": 1.0}}})");
  auto const out = scratch("bad.csv");
  fs::remove(out);
  CHECK(cli("run --config " + config.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("command line: verify, dump-matrix, lyapunov-sweep")
{
  CHECK(cli("verify --suite tensor") == 0);
  CHECK(cli("verify --suite tensor --inject-fault") == 1);
  CHECK(cli("verify --suite bogus") != 0);

  auto const config = scratch("dump.json");
  write_file(config, R"({"model": {"n": 1, "d": 1, "L_list": [1],
                         "distribution": {"kind": "finite", "values": [0, 1], "weights": [0.5, 0.5]}},
                         "lyapunov": {"energies": [2.5, 5.0], "steps": 20000}})");
  auto const dump = scratch("dump.txt");
  CHECK(cli("dump-matrix --config " + config.string() + " --out " + dump.string()) == 0);
  auto const text = read_file(dump);
  CHECK(text.rfind("# wegnerlab matrix v1\n# dim 3\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2 + 3 + 4);

  auto const sweep = scratch("sweep.csv");
  CHECK(cli("lyapunov-sweep --config " + config.string() + " --out " + sweep.string()) == 0);
  auto const csv = read_file(sweep);
  CHECK(csv.rfind("E,gamma_hat,stderr\r\n2.5,", 0) == 0);
}
