#include "qdob/filter_design.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "qdob/errors.hpp"

namespace qdob {

namespace {

constexpr double kPi = std::numbers::pi;

double amplitude_at(std::span<const double> taps, int order, double w) {
  double acc = taps[static_cast<std::size_t>(order)];
  for (int n = 1; n <= order; ++n) {
    acc += 2.0 * taps[static_cast<std::size_t>(order + n)] *
           std::cos(static_cast<double>(n) * w);
  }
  return acc;
}

// Golden-section maximization on a bracket known to contain a local max.
double golden_max(std::span<const double> taps, int order, double lo,
                  double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = amplitude_at(taps, order, x1);
  double f2 = amplitude_at(taps, order, x2);
  while (b - a > 1e-14) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = amplitude_at(taps, order, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = amplitude_at(taps, order, x1);
    }
  }
  return amplitude_at(taps, order, 0.5 * (a + b));
}

long long round_half_away(double x) { return std::llround(x); }

}  // namespace

double HyperParams::period() const { return 2.0 * kPi / omega0; }

void HyperParams::validate() const {
  if (!(sample_time > 0.0)) throw config_error("sample_time must be > 0");
  if (!(omega0 > 0.0)) throw config_error("omega0 must be > 0");
  if (!(omega_a > 0.0)) throw config_error("omega_a must be > 0");
  if (!(omega_b > 0.0)) throw config_error("omega_b must be > 0");
  if (stages < 1) throw config_error("stages must be >= 1");
  if (max_order < 1) throw config_error("max_order must be >= 1");
  const double half_lifted_band = kPi / period();
  if (!(rho >= 0.0) || !(rho < half_lifted_band)) {
    throw config_error("rho must lie in [0, pi/L) = [0, " +
                       std::to_string(half_lifted_band) + ")");
  }
  if (!(sample_time < period())) {
    throw config_error("sample_time must be smaller than the period L");
  }
}

std::uint64_t params_hash(const HyperParams& p) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_double = [&mix](double v) { mix(&v, sizeof(v)); };
  mix_double(p.sample_time);
  mix_double(p.omega0);
  mix_double(p.omega_a);
  mix_double(p.omega_b);
  mix_double(p.rho);
  mix(&p.stages, sizeof(p.stages));
  mix(&p.max_order, sizeof(p.max_order));
  return h;
}

double PhiPlan::loop_gain() const { return omega_c * params.period(); }

double blackman_weight(int n, int order) {
  if (std::abs(n) > order) return 0.0;
  const double x = static_cast<double>(std::abs(n)) * kPi /
                   static_cast<double>(order);
  return 0.42 + 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
}

double ideal_lowpass_tap(int n, double cutoff, double spacing) {
  if (n == 0) return spacing * cutoff / kPi;
  const double m = static_cast<double>(std::abs(n));
  return std::sin(m * spacing * cutoff) / (m * kPi);
}

double separation_gain(const HyperParams& p) {
  const double period = p.period();
  if (!(p.rho >= 0.0) || !(p.rho < kPi / period)) {
    throw config_error("separation_gain: rho outside [0, pi/L)");
  }
  return (2.0 / period) * std::tan(0.5 * period * p.rho);
}

StageSchedule stage_schedule(const HyperParams& p) {
  if (p.stages < 1) throw config_error("stage_schedule: stages must be >= 1");
  StageSchedule out;
  out.contraction =
      0.5 * std::pow(p.sample_time * p.omega_a / kPi,
                     1.0 / static_cast<double>(p.stages));
  out.spacing.resize(static_cast<std::size_t>(p.stages));
  out.cutoff.resize(static_cast<std::size_t>(p.stages));
  for (int i = 0; i < p.stages; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.spacing[k] = (i == 0) ? p.sample_time : kPi / out.cutoff[k - 1];
    out.cutoff[k] = (i == p.stages - 1)
                        ? p.omega_a
                        : 2.0 * out.contraction * kPi / out.spacing[k];
  }
  return out;
}

int order_select(const HyperParams& p, const StageSchedule& schedule) {
  double spacing_sum = 0.0;
  for (double u : schedule.spacing) spacing_sum += u;
  const double bound = (p.period() - p.sample_time) / spacing_sum;
  if (bound < 1.0) {
    throw config_error(
        "order_select: cascade spacings exceed the period, no admissible "
        "order");
  }
  const int largest = static_cast<int>(std::floor(bound));
  return std::min(largest, p.max_order);
}

double gamma_normalizer(std::span<const double> taps) {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw config_error("gamma_normalizer: tap array must have odd size");
  }
  const int order = static_cast<int>(taps.size() / 2);
  if (order == 0) return taps[0];

  // Dense scan, then polish every local-max bracket so near-degenerate
  // ripple lobes cannot hide the global maximum.
  constexpr int kGrid = 8193;
  std::vector<double> vals(kGrid);
  for (int j = 0; j < kGrid; ++j) {
    vals[static_cast<std::size_t>(j)] =
        amplitude_at(taps, order, kPi * j / (kGrid - 1));
  }
  double best = std::max(vals.front(), vals.back());
  const double h = kPi / (kGrid - 1);
  for (int j = 1; j + 1 < kGrid; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1]) {
      best = std::max(best, golden_max(taps, order, (j - 1) * h, (j + 1) * h));
    }
  }
  return best;
}

PhiPlan build_phi_plan(const HyperParams& p) {
  p.validate();
  const StageSchedule schedule = stage_schedule(p);
  const int order = order_select(p, schedule);

  PhiPlan plan;
  plan.params = p;
  plan.order = order;
  plan.omega_c = separation_gain(p);
  plan.period_samples =
      static_cast<int>(round_half_away(p.period() / p.sample_time));

  long long spacing_total = 0;
  plan.stages.resize(static_cast<std::size_t>(p.stages));
  for (int i = 0; i < p.stages; ++i) {
    const auto k = static_cast<std::size_t>(i);
    StageSpec& st = plan.stages[k];
    st.index = i + 1;
    st.tap_spacing = schedule.spacing[k];
    st.cutoff = schedule.cutoff[k];
    st.spacing_samples =
        static_cast<int>(round_half_away(st.tap_spacing / p.sample_time));
    if (st.spacing_samples < 1) {
      throw config_error("build_phi_plan: stage " + std::to_string(i + 1) +
                         " spacing rounds to zero samples");
    }
    spacing_total += st.spacing_samples;

    st.taps.assign(static_cast<std::size_t>(2 * order + 1), 0.0);
    for (int n = 0; n <= order; ++n) {
      const double v = blackman_weight(n, order) *
                       ideal_lowpass_tap(n, st.cutoff, st.tap_spacing);
      st.taps[static_cast<std::size_t>(order + n)] = v;
      st.taps[static_cast<std::size_t>(order - n)] = v;
    }
    st.gamma = gamma_normalizer(st.taps);
    if (!(st.gamma > 0.0)) {
      throw config_error("build_phi_plan: nonpositive stage normalizer");
    }
  }

  const long long kappa =
      plan.period_samples - static_cast<long long>(order) * spacing_total;
  if (kappa < 1) {
    throw config_error(
        "build_phi_plan: kappa = " + std::to_string(kappa) +
        " < 1; the rounded cascade delay does not fit one period");
  }
  plan.kappa = static_cast<int>(kappa);
  return plan;
}

}  // namespace qdob
