#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "qdob/errors.hpp"
#include "run_config.hpp"

using namespace qdob;
using qdob::cli::RunConfig;
using qdob::cli::parse_config;

namespace {

namespace fs = std::filesystem;

fs::path make_temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("qdob_cli_test_" + tag + "_" +
                        std::to_string(static_cast<unsigned>(getpid())));
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QDOB_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("reference row parses with figure defaults") {
  const RunConfig cfg = parse_config("omega0 = 1\nomega_b = 100\nrho = 0.1");
  CHECK(cfg.params.omega0 == 1.0);
  CHECK(cfg.params.omega_b == 100.0);
  CHECK(cfg.params.rho == 0.1);
  CHECK(cfg.params.sample_time == 1e-3);
  CHECK(cfg.params.omega_a == 10.0);
  CHECK(cfg.params.stages == 3);
  CHECK(cfg.params.max_order == 256);
  CHECK(cfg.plant.num == std::vector<double>{1.0});
  CHECK(cfg.plant.den == std::vector<double>{1.0});
  REQUIRE(cfg.disturbance.harmonics.size() == 1);
  CHECK(cfg.disturbance.harmonics[0].index == 1);
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
  const RunConfig cfg = parse_config(
      "# reference setup\n\n  omega0=2 # trailing comment\n\tomega_b =50\n"
      "rho = 0.3\n");
  CHECK(cfg.params.omega0 == 2.0);
  CHECK(cfg.params.omega_b == 50.0);
  CHECK(cfg.params.rho == 0.3);
}

TEST_CASE("required keys") {
  CHECK_THROWS_WITH_AS(parse_config(""), doctest::Contains("omega0"),
                       config_error);
  CHECK_THROWS_WITH_AS(parse_config("omega0 = 1"),
                       doctest::Contains("omega_b"), config_error);
}

TEST_CASE("rho outside its half-open interval is rejected") {
  CHECK_THROWS_WITH_AS(
      parse_config("omega0 = 1\nomega_b = 100\nrho = 0.6"),
      doctest::Contains("rho"), config_error);
}

TEST_CASE("unknown keys are named") {
  CHECK_THROWS_WITH_AS(
      parse_config("omega0 = 1\nomega_b = 100\nomega_q = 3"),
      doctest::Contains("omega_q"), config_error);
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_config("omega0 = abc\nomega_b = 100"), config_error);
  CHECK_THROWS_AS(parse_config("omega0 = inf\nomega_b = 100"), config_error);
  CHECK_THROWS_AS(parse_config("omega0 = 1e999\nomega_b = 100"), config_error);
  CHECK_THROWS_AS(parse_config("omega0 = 1 2\nomega_b = 100"), config_error);
  CHECK_THROWS_AS(parse_config("omega0 1\nomega_b = 100"), config_error);
  CHECK_THROWS_AS(parse_config("l = 2.5\nomega0 = 1\nomega_b = 1"),
                  config_error);
}

TEST_CASE("plant and disturbance blocks") {
  const RunConfig cfg = parse_config(
      "omega0 = 1\nomega_b = 100\nrho = 0.2\n"
      "plant_num = 2 1\nplant_den = 2 2\n"
      "harmonic = 1 1.0 0\nharmonic = 2 0.5 0.7 0.1\n"
      "envelope_rate = 0.05\nenvelope_depth = 0.4\n"
      "observer = off\nmetric_harmonics = 1 2\nreference = 0.5\nseed = 42");
  CHECK(cfg.plant.num == std::vector<double>{2.0, 1.0});
  CHECK(cfg.plant.den == std::vector<double>{2.0, 2.0});
  REQUIRE(cfg.disturbance.harmonics.size() == 2);
  CHECK(cfg.disturbance.harmonics[1].envelope_phase == 0.1);
  CHECK(cfg.disturbance.envelope_rate == 0.05);
  CHECK_FALSE(cfg.observer_enabled);
  CHECK(cfg.metric_harmonics == std::vector<int>{1, 2});
  CHECK(cfg.reference == 0.5);
  CHECK(cfg.seed == 42);

  CHECK_THROWS_AS(parse_config("omega0 = 1\nomega_b = 1\nplant_num = 1"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config("omega0 = 1\nomega_b = 1\nharmonic = 1 1"), config_error);
  CHECK_THROWS_AS(
      parse_config("omega0 = 1\nomega_b = 1\nobserver = maybe"),
      config_error);
  CHECK_THROWS_AS(
      parse_config("omega0 = 1\nomega_b = 1\ngrid_spacing = cubic"),
      config_error);
}

TEST_CASE("grid overrides apply to the chosen representation") {
  const RunConfig cfg = parse_config(
      "omega0 = 1\nomega_b = 100\nrho = 0.1\n"
      "grid_min = 1e-3\ngrid_max = 2.0\ngrid_count = 11\n"
      "grid_spacing = linear");
  const GridSpec dt = cfg.grid_for(Representation::dt);
  CHECK(dt.min == 1e-3);
  CHECK(dt.max == 2.0);
  CHECK(dt.count == 11);
  CHECK(dt.spacing == GridSpacing::linear);

  const RunConfig plain = parse_config("omega0 = 1\nomega_b = 100");
  const GridSpec dt_default = plain.grid_for(Representation::dt);
  CHECK(dt_default.count == 20001);
  const GridSpec ct_default = plain.grid_for(Representation::ct);
  CHECK(ct_default.max == 100.0 * plain.params.omega_b);
}

TEST_CASE("seventeen significant digits round-trip") {
  for (double v : {1.0 / 3.0, -0.1, 3.141592653589793, 1e-300, 5e-324,
                   -9.9e307, 0.0, 6283.0}) {
    const std::string text = qdob::cli::format_double(v);
    const double parsed = std::strtod(text.c_str(), nullptr);
    CHECK(parsed == v);
  }
}

TEST_CASE("cli exit codes and determinism") {
  const fs::path dir = make_temp_dir("exit");
  write_file(dir / "fast.conf",
             "omega0 = 50\nomega_a = 500\nomega_b = 5000\nrho = 10\n"
             "sim_periods = 24\nquad_tol = 1e-8\n"
             "grid_count = 301\nharmonic = 1 1.0 0\n");
  write_file(dir / "bad.conf", "omega0 = 1\nomega_b = 100\nrho = 0.9\n");
  write_file(dir / "blowup.conf",
             "omega0 = 50\nomega_a = 500\nomega_b = 5000\nrho = 10\n"
             "sim_periods = 24\nharmonic = 1 1e120 0\n");

  SUBCASE("success paths return 0") {
    CHECK(run_cli("design --config " + (dir / "fast.conf").string() +
                  " --out " + (dir / "d1").string()) == 0);
    CHECK(run_cli("bode --config " + (dir / "fast.conf").string() +
                  " --representation dt --out " + (dir / "b1").string()) == 0);
    CHECK(run_cli("integral --config " + (dir / "fast.conf").string() +
                  " --representation dt --out " + (dir / "i1").string()) == 0);
    CHECK(run_cli("sim --config " + (dir / "fast.conf").string() + " --out " +
                  (dir / "s1").string()) == 0);
  }

  SUBCASE("configuration problems return 2") {
    CHECK(run_cli("design --config " + (dir / "bad.conf").string() +
                  " --out " + (dir / "d2").string()) == 2);
    CHECK(run_cli("design --config " + (dir / "missing.conf").string() +
                  " --out " + (dir / "d3").string()) == 2);
    CHECK(run_cli("design") == 2);              // missing --config
    CHECK(run_cli("bode --config " + (dir / "fast.conf").string() +
                  " --representation qt --out " + (dir / "b2").string()) ==
          2);
  }

  SUBCASE("numerical failures return 3") {
    CHECK(run_cli("sim --config " + (dir / "blowup.conf").string() +
                  " --out " + (dir / "s3").string()) == 3);
  }

  SUBCASE("identical runs produce byte-identical outputs") {
    REQUIRE(run_cli("bode --config " + (dir / "fast.conf").string() +
                    " --representation dt --seed 7 --out " +
                    (dir / "r1").string()) == 0);
    REQUIRE(run_cli("bode --config " + (dir / "fast.conf").string() +
                    " --representation dt --seed 7 --out " +
                    (dir / "r2").string()) == 0);
    CHECK(read_file(dir / "r1" / "bode_dt.csv") ==
          read_file(dir / "r2" / "bode_dt.csv"));
    CHECK(!read_file(dir / "r1" / "bode_dt.csv").empty());

    REQUIRE(run_cli("sim --config " + (dir / "fast.conf").string() +
                    " --out " + (dir / "r3").string()) == 0);
    REQUIRE(run_cli("sim --config " + (dir / "fast.conf").string() +
                    " --out " + (dir / "r4").string()) == 0);
    CHECK(read_file(dir / "r3" / "sim_trace.csv") ==
          read_file(dir / "r4" / "sim_trace.csv"));
    CHECK(read_file(dir / "r3" / "sim_metrics.csv") ==
          read_file(dir / "r4" / "sim_metrics.csv"));
  }

  fs::remove_all(dir);
}

TEST_CASE("design output carries the rounding chain") {
  const fs::path dir = make_temp_dir("design");
  write_file(dir / "p1.conf", "omega0 = 1\nomega_b = 100\nrho = 0.1\n");
  REQUIRE(run_cli("design --config " + (dir / "p1.conf").string() +
                  " --out " + dir.string()) == 0);
  const std::string summary = read_file(dir / "design_summary.csv");
  CHECK(summary.find("116,19,6283,") != std::string::npos);
  fs::remove_all(dir);
}
