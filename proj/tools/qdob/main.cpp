#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qdob/errors.hpp"
#include "run_config.hpp"

namespace {

qdob::Representation parse_representation(const std::string& name) {
  if (name == "ct") return qdob::Representation::ct;
  if (name == "dt") return qdob::Representation::dt;
  throw qdob::config_error("--representation must be 'ct' or 'dt'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quasiperiodic disturbance observer toolkit: filter design, "
      "sensitivity Bode tables, sensitivity-integral verification, and "
      "closed-loop simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string representation = "dt";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub, bool with_representation) {
    sub->add_option("--config", config_path, "path to the key=value config")
        ->required();
    sub->add_option("--out", out_dir, "output directory for CSV files");
    sub->add_option_function<std::uint64_t>(
           "--seed",
           [&](std::uint64_t v) {
             seed = v;
             seed_set = true;
           },
           "seed recorded in the run configuration");
    if (with_representation) {
      sub->add_option("--representation", representation,
                      "ct or dt (default dt)");
    }
  };

  CLI::App* design = app.add_subcommand("design", "write the filter plan");
  add_common(design, false);
  CLI::App* bode =
      app.add_subcommand("bode", "tabulate Gamma, S, T over a grid");
  add_common(bode, true);
  CLI::App* integral = app.add_subcommand(
      "integral", "verify the sensitivity integral against its closed form");
  add_common(integral, true);
  CLI::App* sim =
      app.add_subcommand("sim", "run the closed loop and measure attenuation");
  add_common(sim, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qdob::cli::kExitOk : qdob::cli::kExitConfig;
  }

  try {
    qdob::cli::RunConfig cfg = qdob::cli::load_config_file(config_path);
    if (seed_set) cfg.seed = seed;
    if (design->parsed()) return qdob::cli::cmd_design(cfg, out_dir);
    if (bode->parsed()) {
      return qdob::cli::cmd_bode(cfg, parse_representation(representation),
                                 out_dir);
    }
    if (integral->parsed()) {
      return qdob::cli::cmd_integral(
          cfg, parse_representation(representation), out_dir);
    }
    if (sim->parsed()) return qdob::cli::cmd_sim(cfg, out_dir);
  } catch (const qdob::eval_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return qdob::cli::kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return qdob::cli::kExitConfig;
  }
  return qdob::cli::kExitConfig;
}
