#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qdob/errors.hpp"
#include "qdob/freq_response.hpp"

using namespace qdob;

namespace {

constexpr double kPi = std::numbers::pi;

HyperParams p1_params() {
  HyperParams p;
  p.sample_time = 1e-3;
  p.omega0 = 1.0;
  p.omega_a = 10.0;
  p.omega_b = 100.0;
  p.rho = 0.1;
  return p;
}

// Fast parameter set sharing the structure of the slow ones.
HyperParams fast_params() {
  HyperParams p;
  p.sample_time = 1e-3;
  p.omega0 = 50.0;
  p.omega_a = 500.0;
  p.omega_b = 5000.0;
  p.rho = 10.0;
  return p;
}

PhiPlan identity_stage_plan() {
  PhiPlan plan;
  plan.params = fast_params();
  plan.order = 0;
  plan.kappa = 1;
  plan.period_samples = 126;
  plan.omega_c = separation_gain(plan.params);
  StageSpec st;
  st.index = 1;
  st.tap_spacing = plan.params.sample_time;
  st.cutoff = plan.params.omega_a;
  st.spacing_samples = 1;
  st.taps = {1.0};
  st.gamma = 1.0;
  plan.stages.push_back(st);
  return plan;
}

// Deterministic uniform double in [0, 1).
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("phi at s = 0") {
  const PhiPlan trivial = identity_stage_plan();
  CHECK(phi_ct(trivial, Complex(0.0, 0.0)) == Complex(1.0, 0.0));
  CHECK(phi_dt(trivial, Complex(1.0, 0.0)) == Complex(1.0, 0.0));

  const PhiPlan plan = build_phi_plan(p1_params());
  const Complex dc = phi_ct(plan, Complex(0.0, 0.0));
  CHECK(dc.imag() == 0.0);
  CHECK(dc.real() > 0.0);
  CHECK(dc.real() <= 1.0);
}

TEST_CASE("P1 cascade passes the fundamental") {
  const PhiPlan plan = build_phi_plan(p1_params());
  const double mag = std::abs(phi_ct(plan, Complex(0.0, plan.params.omega0)));
  CHECK(std::abs(mag - 1.0) < 1e-2);
}

TEST_CASE("ct and dt cascades coincide on z = exp(sT)") {
  const PhiPlan plan = build_phi_plan(p1_params());
  const double T = plan.params.sample_time;
  double worst = 0.0;
  for (int j = 1; j <= 500; ++j) {
    const double omega = kPi / T * j / 500.0;
    const Complex via_ct = phi_ct(plan, Complex(0.0, omega));
    const Complex via_dt = phi_dt(plan, std::polar(1.0, omega * T));
    worst = std::max(worst, std::abs(via_ct - via_dt));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("dt cascade gain bound on the unit circle") {
  const PhiPlan plan = build_phi_plan(fast_params());
  for (int j = 1; j <= 20000; ++j) {
    const double omega = kPi * j / 20000.0;
    CHECK(std::abs(phi_dt(plan, std::polar(1.0, omega))) <= 1.0 + 1e-12);
  }
}

TEST_CASE("phi domain errors") {
  const PhiPlan plan = build_phi_plan(fast_params());
  CHECK_THROWS_AS(phi_dt(plan, Complex(0.0, 0.0)), eval_error);
  // huge negative real part overflows the anticausal powers
  CHECK_THROWS_AS(phi_ct(plan, Complex(-1e7, 0.0)), eval_error);
}

TEST_CASE("open loop, continuous time") {
  HyperParams p = p1_params();

  SUBCASE("rho = 0 kills the loop") {
    p.rho = 0.0;
    const PhiPlan plan = build_phi_plan(p);
    for (double omega : {0.1, 1.0, 10.0, 1000.0}) {
      CHECK(open_loop_ct(plan, Complex(0.0, omega)) == Complex(0.0, 0.0));
    }
  }

  SUBCASE("rolls off along the real axis") {
    const PhiPlan plan = build_phi_plan(p);
    CHECK(std::abs(open_loop_ct(plan, Complex(1e6, 0.0))) < 1e-3);
  }

  SUBCASE("mid-band point between harmonics") {
    const PhiPlan plan = build_phi_plan(p);
    const Complex gamma =
        open_loop_ct(plan, Complex(0.0, 0.5 * p.omega0));
    CHECK(std::abs(gamma) < 0.05);
    const SensitivityPair pair = sensitivity_pair(gamma);
    CHECK(std::abs(std::abs(pair.sensitivity) - 1.0) < 0.05);
  }

  SUBCASE("pole of B is rejected") {
    const PhiPlan plan = build_phi_plan(p);
    CHECK_THROWS_AS(open_loop_ct(plan, Complex(-p.omega_b, 0.0)), eval_error);
  }
}

TEST_CASE("open loop, discrete time") {
  const HyperParams p = p1_params();
  const PhiPlan plan = build_phi_plan(p);

  SUBCASE("large z limit") {
    const double wbt = p.omega_b * p.sample_time;
    const Complex z(1e8, 0.0);
    CHECK(std::abs(phi_dt(plan, z)) < 1e-100);
    const Complex expected =
        0.5 * plan.loop_gain() * (wbt * z / ((1.0 + wbt) * z - 1.0));
    CHECK(std::abs(open_loop_dt(plan, z) - expected) <
          1e-9 * std::abs(expected));
  }

  SUBCASE("harmonic notch gain is large") {
    const Complex z = std::polar(1.0, p.omega0 * p.sample_time);
    CHECK(std::abs(open_loop_dt(plan, z)) > 100.0);
  }

  SUBCASE("backward-Euler pole is rejected") {
    const double wbt = p.omega_b * p.sample_time;
    CHECK_THROWS_AS(open_loop_dt(plan, Complex(1.0 / (1.0 + wbt), 0.0)),
                    eval_error);
  }
}

TEST_CASE("sensitivity pair") {
  CHECK(sensitivity_pair(Complex(0.0, 0.0)).sensitivity == Complex(1.0, 0.0));
  CHECK(sensitivity_pair(Complex(0.0, 0.0)).comp_sensitivity ==
        Complex(0.0, 0.0));

  const SensitivityPair half = sensitivity_pair(Complex(1.0, 0.0));
  CHECK(half.sensitivity == Complex(0.5, 0.0));
  CHECK(half.comp_sensitivity == Complex(0.5, 0.0));

  const SensitivityPair huge = sensitivity_pair(Complex(1e30, 0.0));
  CHECK(std::abs(huge.sensitivity) < 1e-29);
  CHECK(std::abs(huge.comp_sensitivity - 1.0) < 1e-12);

  CHECK_THROWS_AS(sensitivity_pair(Complex(-1.0, 0.0)), eval_error);
}

TEST_CASE("grids") {
  const std::vector<double> lin =
      make_grid({0.0, 1.0, 5, GridSpacing::linear});
  CHECK(lin == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

  const std::vector<double> lg = make_grid({1e-2, 1e2, 5, GridSpacing::log});
  CHECK(lg.front() == 1e-2);
  CHECK(lg.back() == 1e2);
  CHECK(lg[2] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < lg.size(); ++i) CHECK(lg[i] > lg[i - 1]);

  CHECK_THROWS_AS(make_grid({0.0, 1.0, 5, GridSpacing::log}), config_error);
  CHECK_THROWS_AS(make_grid({0.0, 1.0, 1, GridSpacing::linear}), config_error);
  CHECK_THROWS_AS(make_grid({2.0, 1.0, 5, GridSpacing::linear}), config_error);
}

TEST_CASE("bode table basics") {
  const HyperParams p = fast_params();
  const PhiPlan plan = build_phi_plan(p);

  SUBCASE("dt grid domain") {
    CHECK_THROWS_AS(
        bode_table(plan, Representation::dt, {0.0, kPi, 64, GridSpacing::linear}),
        config_error);
    CHECK_THROWS_AS(
        bode_table(plan, Representation::dt, {0.1, 4.0, 64, GridSpacing::linear}),
        config_error);
  }

  SUBCASE("rho = 0 gives unit sensitivity") {
    HyperParams p0 = p;
    p0.rho = 0.0;
    const PhiPlan plan0 = build_phi_plan(p0);
    const ResponseTable t = bode_table(plan0, Representation::dt,
                                       {1e-3, kPi, 101, GridSpacing::log});
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(t.sensitivity[i] == Complex(1.0, 0.0));
      CHECK(t.comp_sensitivity[i] == Complex(0.0, 0.0));
      CHECK(t.flagged[i] == 0);
    }
  }

  SUBCASE("suppression dips below -3 dB inside the bands") {
    const ResponseTable t = bode_table(plan, Representation::dt,
                                       default_grid(p, Representation::dt));
    CHECK(t.params_hash == params_hash(p));
    // at least one grid point inside each of the first three bands is
    // below -3 dB
    for (int n = 1; n <= 3; ++n) {
      bool dipped = false;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double omega = t.grid[i] / p.sample_time;
        if (std::abs(omega - n * p.omega0) < p.rho && !t.flagged[i]) {
          if (20.0 * std::log10(std::abs(t.sensitivity[i])) < -3.0) {
            dipped = true;
          }
        }
      }
      CHECK(dipped);
    }
  }
}

TEST_CASE("unit sum holds on every table row") {
  const PhiPlan plan = build_phi_plan(fast_params());
  for (Representation rep : {Representation::dt, Representation::ct}) {
    const GridSpec spec = rep == Representation::dt
                              ? GridSpec{1e-4, kPi, 4001, GridSpacing::log}
                              : GridSpec{1e-3, 5e5, 4001, GridSpacing::log};
    const ResponseTable t = bode_table(plan, rep, spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.flagged[i]) continue;
      worst = std::max(worst, std::abs(t.sensitivity[i] +
                                       t.comp_sensitivity[i] - 1.0));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("conjugate symmetry") {
  const PhiPlan plan = build_phi_plan(fast_params());
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 50; ++i) {
    const Complex s(2.0 * unit_draw(rng) - 1.0, 3000.0 * unit_draw(rng));
    const Complex a = open_loop_ct(plan, s);
    const Complex b = open_loop_ct(plan, std::conj(s));
    CHECK(std::abs(b - std::conj(a)) <= 1e-13 * (1.0 + std::abs(a)));

    const Complex z = std::polar(0.5 + unit_draw(rng),
                                 kPi * (2.0 * unit_draw(rng) - 1.0));
    const Complex c = open_loop_dt(plan, z);
    const Complex d = open_loop_dt(plan, std::conj(z));
    CHECK(std::abs(d - std::conj(c)) <= 1e-13 * (1.0 + std::abs(c)));
  }
}

TEST_CASE("phase bound implies no amplification, pointwise") {
  const PhiPlan plan = build_phi_plan(fast_params());
  const ResponseTable t = bode_table(
      plan, Representation::dt, default_grid(fast_params(), Representation::dt));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.flagged[i]) continue;
    if (std::abs(std::arg(t.open_loop[i])) <= kPi / 2.0) {
      CHECK(std::abs(t.sensitivity[i]) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("maximum-modulus sampling in the right half-plane") {
  const PhiPlan plan = build_phi_plan(fast_params());
  const double T = plan.params.sample_time;

  double axis_max = 0.0;
  for (int j = 0; j <= 50000; ++j) {
    const double omega = kPi / T * j / 50000.0;
    axis_max = std::max(axis_max, std::abs(phi_ct(plan, Complex(0.0, omega))));
  }

  std::mt19937_64 rng(2718281828u);
  for (int i = 0; i < 100; ++i) {
    const double re = unit_draw(rng) / T;
    const double im = unit_draw(rng) * kPi / T;
    const Complex s(re == 0.0 ? 0.5 / T : re, im);
    const double mag = std::abs(phi_ct(plan, s));
    CHECK(mag < axis_max + 1e-9);
    CHECK(mag < 1.0);
    // the loop evaluator never reports pole proximity off the axis
    CHECK_NOTHROW(open_loop_ct(plan, s));
    CHECK(std::abs(1.0 - phi_ct(plan, s)) > 0.0);
  }
}
