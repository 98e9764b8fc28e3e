#include "qdob/freq_response.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qdob/errors.hpp"

namespace qdob {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-300;

// Tap polynomial of one stage evaluated in the per-spacing unit
// `step` (= e^{-T*Ubar*s} or z^{-Ubar}); term exponents run 0..2N. Powers
// come from a forward product chain so magnitudes shrink or grow
// monotonically and the sum is accumulated in symmetric (n, -n) pairs of
// increasing |n|.
Complex stage_sum(const StageSpec& st, int order, Complex step,
                  std::vector<Complex>& scratch) {
  const std::vector<double>& taps = st.taps;
  scratch.resize(static_cast<std::size_t>(2 * order + 1));
  scratch[0] = Complex(1.0, 0.0);
  for (int m = 1; m <= 2 * order; ++m) {
    scratch[static_cast<std::size_t>(m)] =
        scratch[static_cast<std::size_t>(m - 1)] * step;
  }
  // center tap n = 0 sits at exponent N
  Complex acc = taps[static_cast<std::size_t>(order)] *
                scratch[static_cast<std::size_t>(order)];
  for (int n = 1; n <= order; ++n) {
    const double alpha = taps[static_cast<std::size_t>(order + n)];
    acc += alpha * (scratch[static_cast<std::size_t>(order - n)] +
                    scratch[static_cast<std::size_t>(order + n)]);
  }
  return acc / st.gamma;
}

bool finite(Complex v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

Complex phi_from_steps(const PhiPlan& plan, Complex prefactor,
                       const std::vector<Complex>& steps) {
  thread_local std::vector<Complex> scratch;
  Complex out = prefactor;
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    out *= stage_sum(plan.stages[i], plan.order, steps[i], scratch);
  }
  if (!finite(out)) {
    throw eval_error("phi: overflow while evaluating the cascade");
  }
  return out;
}

}  // namespace

Complex phi_ct(const PhiPlan& plan, Complex s) {
  const double T = plan.params.sample_time;
  std::vector<Complex> steps(plan.stages.size());
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    steps[i] = std::exp(-T * static_cast<double>(plan.stages[i].spacing_samples) * s);
  }
  const Complex prefactor = std::exp(-static_cast<double>(plan.kappa) * T * s);
  return phi_from_steps(plan, prefactor, steps);
}

Complex phi_dt(const PhiPlan& plan, Complex z) {
  if (z == Complex(0.0, 0.0)) {
    throw eval_error("phi_dt: z = 0 is outside the domain");
  }
  std::vector<Complex> steps(plan.stages.size());
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    steps[i] = std::pow(z, -static_cast<double>(plan.stages[i].spacing_samples));
  }
  const Complex prefactor = std::pow(z, -static_cast<double>(plan.kappa));
  return phi_from_steps(plan, prefactor, steps);
}

Complex open_loop_ct(const PhiPlan& plan, Complex s) {
  const double omega_b = plan.params.omega_b;
  const Complex denom_b = s + omega_b;
  if (denom_b == Complex(0.0, 0.0)) {
    throw eval_error("open_loop_ct: s = -omega_b is a pole of B");
  }
  const Complex phi = phi_ct(plan, s);
  const Complex one_minus = 1.0 - phi;
  if (std::abs(one_minus) < kPoleTol) {
    throw eval_error("open_loop_ct: pole proximity, |1 - Phi| < 1e-300");
  }
  return 0.5 * plan.loop_gain() * (1.0 + phi) / one_minus *
         (omega_b / denom_b);
}

Complex open_loop_dt(const PhiPlan& plan, Complex z) {
  const double wbt = plan.params.omega_b * plan.params.sample_time;
  const Complex denom_b = (1.0 + wbt) * z - 1.0;
  if (std::abs(denom_b) < kPoleTol) {
    throw eval_error("open_loop_dt: z hits the backward-Euler pole");
  }
  const Complex phi = phi_dt(plan, z);
  const Complex one_minus = 1.0 - phi;
  if (std::abs(one_minus) < kPoleTol) {
    throw eval_error("open_loop_dt: pole proximity, |1 - Phi| < 1e-300");
  }
  return 0.5 * plan.loop_gain() * (1.0 + phi) / one_minus *
         (wbt * z / denom_b);
}

SensitivityPair sensitivity_pair(Complex open_loop) {
  const Complex denom = 1.0 + open_loop;
  if (denom == Complex(0.0, 0.0)) {
    throw eval_error("sensitivity_pair: open loop equals -1");
  }
  const Complex s = 1.0 / denom;
  return {s, open_loop * s};
}

std::vector<double> make_grid(const GridSpec& spec) {
  if (spec.count < 2) throw config_error("grid: count must be >= 2");
  if (!(spec.max > spec.min)) throw config_error("grid: max must exceed min");
  if (spec.spacing == GridSpacing::log && !(spec.min > 0.0)) {
    throw config_error("grid: log spacing requires min > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(spec.count));
  const double n1 = static_cast<double>(spec.count - 1);
  if (spec.spacing == GridSpacing::linear) {
    for (int i = 0; i < spec.count; ++i) {
      grid[static_cast<std::size_t>(i)] =
          spec.min + (spec.max - spec.min) * (i / n1);
    }
  } else {
    const double ratio = std::log(spec.max / spec.min);
    for (int i = 0; i < spec.count; ++i) {
      grid[static_cast<std::size_t>(i)] = spec.min * std::exp(ratio * i / n1);
    }
  }
  grid.front() = spec.min;
  grid.back() = spec.max;
  return grid;
}

GridSpec default_grid(const HyperParams& p, Representation rep) {
  if (rep == Representation::dt) {
    return {1e-4, kPi, 20001, GridSpacing::log};
  }
  return {1e-4 * p.omega0, 100.0 * p.omega_b, 20001, GridSpacing::log};
}

ResponseTable bode_table(const PhiPlan& plan, Representation rep,
                         const GridSpec& grid_spec) {
  GridSpec spec = grid_spec;
  if (rep == Representation::dt) {
    if (!(spec.min > 0.0) || spec.max > kPi + 1e-15) {
      throw config_error("bode_table: dt grid must lie in (0, pi]");
    }
    spec.max = std::min(spec.max, kPi);
  } else {
    spec.min = std::max(spec.min, 1e-12);
  }

  ResponseTable table;
  table.representation = rep;
  table.grid = make_grid(spec);
  table.params_hash = params_hash(plan.params);
  const std::size_t n = table.grid.size();
  table.open_loop.resize(n);
  table.sensitivity.resize(n);
  table.comp_sensitivity.resize(n);
  table.flagged.assign(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    try {
      const Complex gamma =
          rep == Representation::dt
              ? open_loop_dt(plan, std::polar(1.0, table.grid[i]))
              : open_loop_ct(plan, Complex(0.0, table.grid[i]));
      const SensitivityPair pair = sensitivity_pair(gamma);
      table.open_loop[i] = gamma;
      table.sensitivity[i] = pair.sensitivity;
      table.comp_sensitivity[i] = pair.comp_sensitivity;
    } catch (const eval_error&) {
      table.flagged[i] = 1;
      table.open_loop[i] = Complex(0.0, 0.0);
      table.sensitivity[i] = Complex(0.0, 0.0);
      table.comp_sensitivity[i] = Complex(0.0, 0.0);
    }
  }
  return table;
}

}  // namespace qdob
