#include <benchmark/benchmark.h>

#include <complex>
#include <numbers>
#include <vector>

#include "qdob/bode_integral.hpp"
#include "qdob/filter_design.hpp"
#include "qdob/freq_response.hpp"
#include "qdob/simulate.hpp"

namespace {

using namespace qdob;

HyperParams reference_params() {
  HyperParams p;
  p.sample_time = 1e-3;
  p.omega0 = 1.0;
  p.omega_a = 10.0;
  p.omega_b = 100.0;
  p.rho = 0.1;
  return p;
}

HyperParams fast_params() {
  HyperParams p;
  p.sample_time = 1e-3;
  p.omega0 = 50.0;
  p.omega_a = 500.0;
  p.omega_b = 5000.0;
  p.rho = 10.0;
  return p;
}

void BM_build_phi_plan(benchmark::State& state) {
  const HyperParams p = reference_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_phi_plan(p));
  }
}
BENCHMARK(BM_build_phi_plan);

void BM_phi_dt_point(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(reference_params());
  double omega = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi_dt(plan, std::polar(1.0, omega)));
    omega += 1e-6;
  }
}
BENCHMARK(BM_phi_dt_point);

void BM_phi_ct_point(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(reference_params());
  double omega = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi_ct(plan, Complex(0.0, omega)));
    omega += 1e-3;
  }
}
BENCHMARK(BM_phi_ct_point);

void BM_open_loop_dt_point(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(reference_params());
  double omega = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(open_loop_dt(plan, std::polar(1.0, omega)));
    omega += 1e-6;
  }
}
BENCHMARK(BM_open_loop_dt_point);

void BM_bode_table_dt(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(reference_params());
  const GridSpec grid{1e-4, std::numbers::pi, static_cast<int>(state.range(0)),
                      GridSpacing::log};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bode_table(plan, Representation::dt, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_bode_table_dt)->Arg(256)->Arg(2048);

void BM_integrate_dt(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(fast_params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_ln_s_dt(plan));
  }
}
BENCHMARK(BM_integrate_dt);

void BM_closed_loop_period(benchmark::State& state) {
  const HyperParams p = fast_params();
  const PhiPlan plan = build_phi_plan(p);
  const auto steps = static_cast<std::size_t>(plan.period_samples) * 2;
  std::vector<double> d(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    d[k] = std::cos(p.omega0 * static_cast<double>(k) * p.sample_time);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_closed_loop(default_plant(), plan, d, 0.0, steps));
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_closed_loop_period);

void BM_gamma_normalizer(benchmark::State& state) {
  const PhiPlan plan = build_phi_plan(reference_params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_normalizer(plan.stages[0].taps));
  }
}
BENCHMARK(BM_gamma_normalizer);

}  // namespace

BENCHMARK_MAIN();
