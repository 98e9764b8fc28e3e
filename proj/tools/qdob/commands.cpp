#include "commands.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>

#include "csv.hpp"
#include "qdob/bode_integral.hpp"
#include "qdob/errors.hpp"
#include "qdob/simulate.hpp"

namespace qdob::cli {

namespace {

double magnitude_db(Complex v) { return 20.0 * std::log10(std::abs(v)); }

double phase_deg(Complex v) {
  return std::arg(v) * 180.0 / std::numbers::pi;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw config_error("cannot create output directory '" + dir.string() +
                       "'");
  }
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const eval_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  }
}

}  // namespace

int cmd_design(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guarded([&]() {
    const PhiPlan plan = build_phi_plan(cfg.params);
    ensure_dir(out_dir);

    CsvWriter stages(out_dir / "design_stages.csv");
    stages.header({"i", "U_i", "omega_i", "Ubar_i", "gamma_i", "tap_count"});
    for (const StageSpec& st : plan.stages) {
      stages.begin_row();
      stages.field(static_cast<long long>(st.index));
      stages.field(st.tap_spacing);
      stages.field(st.cutoff);
      stages.field(static_cast<long long>(st.spacing_samples));
      stages.field(st.gamma);
      stages.field(static_cast<long long>(st.taps.size()));
      stages.end_row();
    }

    CsvWriter summary(out_dir / "design_summary.csv");
    summary.header({"N", "kappa", "Lbar", "omega_c"});
    summary.begin_row();
    summary.field(static_cast<long long>(plan.order));
    summary.field(static_cast<long long>(plan.kappa));
    summary.field(static_cast<long long>(plan.period_samples));
    summary.field(plan.omega_c);
    summary.end_row();

    std::printf("design: N=%d kappa=%d Lbar=%d omega_c=%s\n", plan.order,
                plan.kappa, plan.period_samples,
                format_double(plan.omega_c).c_str());
    return kExitOk;
  });
}

int cmd_bode(const RunConfig& cfg, Representation rep,
             const std::filesystem::path& out_dir) {
  return guarded([&]() {
    const PhiPlan plan = build_phi_plan(cfg.params);
    const ResponseTable table = bode_table(plan, rep, cfg.grid_for(rep));
    ensure_dir(out_dir);

    const char* name =
        rep == Representation::dt ? "bode_dt.csv" : "bode_ct.csv";
    CsvWriter csv(out_dir / name);
    csv.header({"freq", "gamma_re", "gamma_im", "gamma_db", "gamma_phase_deg",
                "s_re", "s_im", "s_db", "s_phase_deg", "t_re", "t_im", "t_db",
                "t_phase_deg", "flagged"});
    for (std::size_t i = 0; i < table.size(); ++i) {
      csv.begin_row();
      csv.field(table.grid[i]);
      for (const Complex v :
           {table.open_loop[i], table.sensitivity[i],
            table.comp_sensitivity[i]}) {
        csv.field(v.real());
        csv.field(v.imag());
        csv.field(magnitude_db(v));
        csv.field(phase_deg(v));
      }
      csv.field(static_cast<long long>(table.flagged[i]));
      csv.end_row();
    }
    std::printf("bode: %zu rows -> %s\n", table.size(),
                (out_dir / name).string().c_str());
    return kExitOk;
  });
}

int cmd_integral(const RunConfig& cfg, Representation rep,
                 const std::filesystem::path& out_dir) {
  return guarded([&]() {
    const PhiPlan plan = build_phi_plan(cfg.params);
    const IntegralSweep sweep =
        rep == Representation::dt
            ? integrate_ln_s_dt(plan, cfg.quad)
            : integrate_ln_s_ct(
                  plan, cfg.ct_upper_factor * cfg.params.omega_b, cfg.quad);
    const ConvergenceReport report = convergence_report(sweep);
    ensure_dir(out_dir);

    const char* name =
        rep == Representation::dt ? "integral_dt.csv" : "integral_ct.csv";
    CsvWriter csv(out_dir / name);
    csv.header({"w", "partial", "target", "rel_error"});
    for (std::size_t i = 0; i < sweep.upper_limits.size(); ++i) {
      csv.begin_row();
      csv.field(sweep.upper_limits[i]);
      csv.field(sweep.partials[i]);
      csv.field(sweep.target.value);
      csv.field(report.errors[i]);
      csv.end_row();
    }
    std::printf(
        "integral (%s): closed form %s, numeric %s, final %s error %s, "
        "monotone %s, %ld evaluations, %d flagged panels\n",
        rep == Representation::dt ? "dt" : "ct",
        format_double(sweep.target.value).c_str(),
        format_double(sweep.total).c_str(),
        report.relative ? "relative" : "absolute",
        format_double(report.final_error).c_str(),
        report.monotone ? "yes" : "no", sweep.evaluations,
        sweep.flagged_panels);
    return kExitOk;
  });
}

int cmd_sim(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guarded([&]() {
    const PhiPlan plan = build_phi_plan(cfg.params);
    const auto steps = static_cast<std::size_t>(plan.period_samples) *
                       static_cast<std::size_t>(cfg.sim_periods);
    const std::vector<double> disturbance =
        make_disturbance(cfg.disturbance, cfg.params, steps);
    const SimTrace closed =
        run_closed_loop(cfg.plant, plan, disturbance, cfg.reference, steps,
                        cfg.observer_enabled);
    const SimTrace open = run_closed_loop(cfg.plant, plan, disturbance,
                                          cfg.reference, steps, false);
    const std::vector<HarmonicAttenuation> metrics =
        suppression_metrics(closed, open, cfg.params, cfg.metric_harmonics,
                            cfg.transient_discard);
    ensure_dir(out_dir);

    CsvWriter trace_csv(out_dir / "sim_trace.csv");
    trace_csv.header({"time", "r", "d", "u", "y", "dhat"});
    for (std::size_t k = 0; k < closed.size(); ++k) {
      trace_csv.begin_row();
      trace_csv.field(closed.time[k]);
      trace_csv.field(closed.reference[k]);
      trace_csv.field(closed.disturbance[k]);
      trace_csv.field(closed.control[k]);
      trace_csv.field(closed.output[k]);
      trace_csv.field(closed.estimate[k]);
      trace_csv.end_row();
    }

    CsvWriter metrics_csv(out_dir / "sim_metrics.csv");
    metrics_csv.header({"harmonic", "predicted_db", "measured_db", "valid"});
    for (const HarmonicAttenuation& m : metrics) {
      double predicted = 0.0;
      if (m.valid) {
        const Complex z = std::polar(
            1.0, m.harmonic * cfg.params.omega0 * cfg.params.sample_time);
        predicted =
            magnitude_db(sensitivity_pair(open_loop_dt(plan, z)).sensitivity);
      }
      metrics_csv.begin_row();
      metrics_csv.field(static_cast<long long>(m.harmonic));
      metrics_csv.field(predicted);
      metrics_csv.field(m.measured_db);
      metrics_csv.field(static_cast<long long>(m.valid ? 1 : 0));
      metrics_csv.end_row();
    }

    std::printf("sim: %zu steps, %zu metric rows -> %s\n", closed.size(),
                metrics.size(), out_dir.string().c_str());
    return kExitOk;
  });
}

}  // namespace qdob::cli
