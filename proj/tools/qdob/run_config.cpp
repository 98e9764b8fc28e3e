#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qdob/errors.hpp"

namespace qdob::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(const std::string& key, std::string_view value) {
  const std::string buf(value);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty() || !std::isfinite(v)) {
    throw config_error("config: key '" + key + "' has a non-finite or "
                       "unparsable value '" + buf + "'");
  }
  return v;
}

long parse_long(const std::string& key, std::string_view value) {
  const double v = parse_double(key, value);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) {
    throw config_error("config: key '" + key + "' expects an integer");
  }
  return n;
}

std::vector<double> parse_list(const std::string& key,
                               std::string_view value) {
  std::vector<double> out;
  std::istringstream in{std::string(value)};
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) {
    throw config_error("config: key '" + key + "' expects a list of numbers");
  }
  return out;
}

}  // namespace

GridSpec RunConfig::grid_for(Representation rep) const {
  GridSpec spec = default_grid(params, rep);
  if (grid_min) spec.min = *grid_min;
  if (grid_max) spec.max = *grid_max;
  if (grid_count) spec.count = *grid_count;
  if (grid_spacing) spec.spacing = *grid_spacing;
  return spec;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  cfg.params.rho = 0.0;
  bool have_omega0 = false;
  bool have_omega_b = false;
  bool have_plant_num = false;
  bool have_plant_den = false;
  std::vector<double> plant_num;
  std::vector<double> plant_den;
  bool have_harmonics = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw config_error("config: line without '=': '" + std::string(line) +
                         "'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("config: empty key");

    if (key == "T") {
      cfg.params.sample_time = parse_double(key, value);
    } else if (key == "omega0") {
      cfg.params.omega0 = parse_double(key, value);
      have_omega0 = true;
    } else if (key == "omega_a") {
      cfg.params.omega_a = parse_double(key, value);
    } else if (key == "omega_b") {
      cfg.params.omega_b = parse_double(key, value);
      have_omega_b = true;
    } else if (key == "rho") {
      cfg.params.rho = parse_double(key, value);
    } else if (key == "l") {
      cfg.params.stages = static_cast<int>(parse_long(key, value));
    } else if (key == "n_max") {
      cfg.params.max_order = static_cast<int>(parse_long(key, value));
    } else if (key == "plant_num") {
      plant_num = parse_list(key, value);
      have_plant_num = true;
    } else if (key == "plant_den") {
      plant_den = parse_list(key, value);
      have_plant_den = true;
    } else if (key == "harmonic") {
      const std::vector<double> v = parse_list(key, value);
      if (v.size() < 3 || v.size() > 4) {
        throw config_error(
            "config: 'harmonic' expects: index amplitude phase "
            "[envelope_phase]");
      }
      HarmonicComponent h;
      h.index = static_cast<int>(v[0]);
      if (static_cast<double>(h.index) != v[0] || h.index < 0) {
        throw config_error("config: harmonic index must be an integer >= 0");
      }
      h.amplitude = v[1];
      h.phase = v[2];
      h.envelope_phase = v.size() == 4 ? v[3] : 0.0;
      cfg.disturbance.harmonics.push_back(h);
      have_harmonics = true;
    } else if (key == "envelope_rate") {
      cfg.disturbance.envelope_rate = parse_double(key, value);
    } else if (key == "envelope_depth") {
      cfg.disturbance.envelope_depth = parse_double(key, value);
    } else if (key == "grid_min") {
      cfg.grid_min = parse_double(key, value);
    } else if (key == "grid_max") {
      cfg.grid_max = parse_double(key, value);
    } else if (key == "grid_count") {
      cfg.grid_count = static_cast<int>(parse_long(key, value));
    } else if (key == "grid_spacing") {
      if (value == "linear") {
        cfg.grid_spacing = GridSpacing::linear;
      } else if (value == "log") {
        cfg.grid_spacing = GridSpacing::log;
      } else {
        throw config_error("config: grid_spacing must be 'linear' or 'log'");
      }
    } else if (key == "quad_tol") {
      cfg.quad.panel_abs_tol = parse_double(key, value);
    } else if (key == "quad_max_depth") {
      cfg.quad.max_depth = static_cast<int>(parse_long(key, value));
    } else if (key == "sweep_points") {
      cfg.quad.sweep_points = static_cast<int>(parse_long(key, value));
    } else if (key == "ct_upper_factor") {
      cfg.ct_upper_factor = parse_double(key, value);
    } else if (key == "sim_periods") {
      cfg.sim_periods = static_cast<int>(parse_long(key, value));
    } else if (key == "transient_discard") {
      cfg.transient_discard = parse_double(key, value);
    } else if (key == "metric_harmonics") {
      cfg.metric_harmonics.clear();
      for (double v : parse_list(key, value)) {
        cfg.metric_harmonics.push_back(static_cast<int>(v));
      }
    } else if (key == "reference") {
      cfg.reference = parse_double(key, value);
    } else if (key == "observer") {
      if (value == "on") {
        cfg.observer_enabled = true;
      } else if (value == "off") {
        cfg.observer_enabled = false;
      } else {
        throw config_error("config: observer must be 'on' or 'off'");
      }
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else {
      throw config_error("config: unknown key '" + key + "'");
    }
  }

  if (!have_omega0) throw config_error("config: required key omega0 missing");
  if (!have_omega_b) {
    throw config_error("config: required key omega_b missing");
  }
  if (have_plant_num != have_plant_den) {
    throw config_error("config: plant_num and plant_den come together");
  }
  if (have_plant_num) {
    cfg.plant.num = plant_num;
    cfg.plant.den = plant_den;
  }
  if (!have_harmonics) {
    cfg.disturbance.harmonics.push_back(HarmonicComponent{});
  }
  cfg.params.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace qdob::cli
