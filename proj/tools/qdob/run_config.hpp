#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdob/bode_integral.hpp"
#include "qdob/filter_design.hpp"
#include "qdob/freq_response.hpp"
#include "qdob/simulate.hpp"

namespace qdob::cli {

/// Everything a run needs, parsed from a flat key = value file. Grid keys
/// override the representation-specific defaults only when present.
struct RunConfig {
  HyperParams params;
  NominalPlant plant = default_plant();
  DisturbanceSpec disturbance;
  QuadConfig quad;

  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<int> grid_count;
  std::optional<GridSpacing> grid_spacing;

  double ct_upper_factor = 100.0;  ///< ct integral limit W = factor * omega_b
  int sim_periods = 40;
  double transient_discard = 0.5;
  std::vector<int> metric_harmonics = {1, 2, 3};
  double reference = 0.0;
  bool observer_enabled = true;
  std::uint64_t seed = 0;

  GridSpec grid_for(Representation rep) const;
};

/// Parses `key = value` lines ('#' starts a comment). Keys: T, omega0,
/// omega_a, omega_b, rho, l, n_max, plant_num, plant_den, harmonic
/// (repeatable: "n amplitude phase [envelope_phase]"), envelope_rate,
/// envelope_depth, grid_min, grid_max, grid_count, grid_spacing, quad_tol,
/// quad_max_depth, sweep_points, ct_upper_factor, sim_periods,
/// transient_discard, metric_harmonics, reference, observer, seed.
/// omega0 and omega_b are required; unknown keys and malformed values throw
/// config_error naming the key.
RunConfig parse_config(std::string_view text);

RunConfig load_config_file(const std::string& path);

}  // namespace qdob::cli
