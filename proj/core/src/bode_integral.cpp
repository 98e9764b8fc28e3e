#include "qdob/bode_integral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qdob/errors.hpp"
#include "qdob/quadrature.hpp"

namespace qdob {

namespace {

constexpr double kPi = std::numbers::pi;

// Slack for the monotonicity flag: pointwise ln|S| <= 0 holds only up to
// rounding in the omega_a << omega_b regime.
bool partials_monotone(const std::vector<double>& w,
                       const std::vector<double>& p) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double slack = 1e-9 * (w[i] - w[i - 1]) + 1e-12 * std::abs(p[i - 1]);
    if (p[i] > p[i - 1] + slack) return false;
  }
  return true;
}

// Breakpoints: harmonics and band edges below `limit`, plus log-spaced
// recording points so every recorded partial ends on a panel boundary.
std::vector<double> breakpoints(const HyperParams& params, double scale,
                                double limit, int sweep_points) {
  std::set<double> pts{0.0, limit};
  for (long n = 1;; ++n) {
    const double harmonic = static_cast<double>(n) * params.omega0 * scale;
    if (harmonic >= limit) break;
    pts.insert(harmonic);
    const double lo = harmonic - params.rho * scale;
    const double hi = harmonic + params.rho * scale;
    if (lo > 0.0 && lo < limit) pts.insert(lo);
    if (hi > 0.0 && hi < limit) pts.insert(hi);
  }
  const double w_lo = std::min(0.1 * params.omega0 * scale, 0.1 * limit);
  const int count = std::max(sweep_points, 2);
  for (int i = 0; i < count; ++i) {
    pts.insert(w_lo * std::exp(std::log(limit / w_lo) * i / (count - 1)));
  }
  std::vector<double> out(pts.begin(), pts.end());
  // drop near-coincident points (band edges can collide with harmonics)
  std::vector<double> dedup;
  dedup.reserve(out.size());
  for (double x : out) {
    if (dedup.empty() || x - dedup.back() > 1e-13 * std::max(1.0, limit)) {
      dedup.push_back(x);
    }
  }
  dedup.back() = limit;
  return dedup;
}

IntegralSweep integrate_breakpointed(
    const PhiPlan& plan, Representation rep, double limit,
    const QuadConfig& config, const std::function<double(double)>& integrand) {
  IntegralSweep sweep;
  sweep.representation = rep;
  sweep.config = config;
  sweep.target = theoretical_value(plan.params, rep);

  const double scale =
      rep == Representation::dt ? plan.params.sample_time : 1.0;
  const std::vector<double> panels =
      breakpoints(plan.params, scale, limit, config.sweep_points);

  std::vector<double> cumulative(panels.size(), 0.0);
  for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
    const AdaptiveResult r =
        integrate_adaptive(integrand, panels[i], panels[i + 1],
                           config.panel_abs_tol, config.max_depth);
    cumulative[i + 1] = cumulative[i] + r.value;
    sweep.error_estimate += r.error;
    sweep.evaluations += r.evaluations;
    sweep.flagged_panels += r.flagged;
  }

  // record the log-spaced subset (plus the final limit)
  const double w_lo = std::min(0.1 * plan.params.omega0 * scale, 0.1 * limit);
  const int count = std::max(config.sweep_points, 2);
  std::set<double> wanted;
  for (int i = 0; i < count; ++i) {
    wanted.insert(w_lo * std::exp(std::log(limit / w_lo) * i / (count - 1)));
  }
  wanted.insert(limit);
  for (double w : wanted) {
    const auto it =
        std::lower_bound(panels.begin(), panels.end(), w - 1e-12 * limit);
    if (it == panels.end()) continue;
    const auto idx = static_cast<std::size_t>(it - panels.begin());
    if (!sweep.upper_limits.empty() &&
        panels[idx] <= sweep.upper_limits.back()) {
      continue;
    }
    sweep.upper_limits.push_back(panels[idx]);
    sweep.partials.push_back(cumulative[idx]);
  }
  if (sweep.upper_limits.empty() || sweep.upper_limits.back() != limit) {
    sweep.upper_limits.push_back(limit);
    sweep.partials.push_back(cumulative.back());
  }

  if (rep == Representation::dt) {
    sweep.total = 2.0 * cumulative.back();
    sweep.error_estimate *= 2.0;
  } else {
    sweep.total = cumulative.back();
  }
  return sweep;
}

}  // namespace

double delta_ct_closed(const HyperParams& p) {
  return -0.25 * kPi * p.omega_b * separation_gain(p) * p.period();
}

double delta_dt_closed(const HyperParams& p) {
  const double wbt = p.omega_b * p.sample_time;
  const double gain = p.omega_b * separation_gain(p) * p.period() *
                      p.sample_time;
  return 2.0 * kPi * std::log(2.0 + 2.0 * wbt) -
         2.0 * kPi * std::log(2.0 + 2.0 * wbt + gain);
}

TheoreticalValue theoretical_value(const HyperParams& p, Representation rep) {
  TheoreticalValue out;
  out.representation = rep;
  out.value =
      rep == Representation::dt ? delta_dt_closed(p) : delta_ct_closed(p);
  out.omega_b = p.omega_b;
  out.omega_c = separation_gain(p);
  out.period = p.period();
  out.sample_time = p.sample_time;
  return out;
}

IntegralSweep integrate_ln_s_ct(const PhiPlan& plan, double upper_limit,
                                const QuadConfig& config) {
  if (!(upper_limit > 0.0)) {
    throw config_error("integrate_ln_s_ct: upper limit must be > 0");
  }
  auto integrand = [&plan](double omega) {
    return -std::log(std::abs(1.0 + open_loop_ct(plan, Complex(0.0, omega))));
  };
  return integrate_breakpointed(plan, Representation::ct, upper_limit, config,
                                integrand);
}

IntegralSweep integrate_ln_s_dt(const PhiPlan& plan,
                                const QuadConfig& config) {
  auto integrand = [&plan](double big_omega) {
    return -std::log(
        std::abs(1.0 + open_loop_dt(plan, std::polar(1.0, big_omega))));
  };
  return integrate_breakpointed(plan, Representation::dt, kPi, config,
                                integrand);
}

ConvergenceReport convergence_report(const IntegralSweep& sweep) {
  if (sweep.upper_limits.empty()) {
    throw config_error("convergence_report: empty sweep");
  }
  ConvergenceReport report;
  report.upper_limits = sweep.upper_limits;
  const double target = sweep.target.value;
  report.relative = target != 0.0;
  const double doubling =
      sweep.representation == Representation::dt ? 2.0 : 1.0;
  report.errors.reserve(sweep.partials.size());
  for (double partial : sweep.partials) {
    const double err = doubling * partial - target;
    report.errors.push_back(report.relative ? std::abs(err / target)
                                            : std::abs(err));
  }
  report.final_error = report.errors.back();
  report.monotone = partials_monotone(sweep.upper_limits, sweep.partials);
  return report;
}

}  // namespace qdob
