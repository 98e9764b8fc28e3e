#pragma once

#include <filesystem>

#include "qdob/freq_response.hpp"
#include "run_config.hpp"

namespace qdob::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// design: writes design_stages.csv and design_summary.csv.
int cmd_design(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// bode: writes bode_ct.csv or bode_dt.csv over the configured grid.
int cmd_bode(const RunConfig& cfg, Representation rep,
             const std::filesystem::path& out_dir);

/// integral: writes integral_ct.csv or integral_dt.csv and prints a
/// summary line with the closed form and the numeric total.
int cmd_integral(const RunConfig& cfg, Representation rep,
                 const std::filesystem::path& out_dir);

/// sim: writes sim_trace.csv and sim_metrics.csv.
int cmd_sim(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace qdob::cli
