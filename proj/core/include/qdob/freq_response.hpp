#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qdob/filter_design.hpp"

namespace qdob {

using Complex = std::complex<double>;

enum class Representation { ct, dt };

enum class GridSpacing { linear, log };

struct GridSpec {
  double min = 0;
  double max = 0;
  int count = 0;
  GridSpacing spacing = GridSpacing::log;
};

/// Frequency grid with open-loop, sensitivity, and complementary
/// sensitivity values. Rows where the evaluator hit a pole are flagged and
/// carry zeros instead of values.
struct ResponseTable {
  Representation representation = Representation::dt;
  std::vector<double> grid;  ///< omega [rad/s] (ct) or Omega [rad/sample] (dt)
  std::vector<Complex> open_loop;
  std::vector<Complex> sensitivity;
  std::vector<Complex> comp_sensitivity;
  std::vector<std::uint8_t> flagged;
  std::uint64_t params_hash = 0;

  std::size_t size() const { return grid.size(); }
};

/// Cascade transfer function at a complex frequency s. Tap terms are
/// accumulated in symmetric (n, -n) pairs of increasing |n|. Throws
/// eval_error on overflow (very negative Re[s]).
Complex phi_ct(const PhiPlan& plan, Complex s);

/// Discrete-time cascade at z. Coincides with phi_ct at s = ln(z)/T by
/// construction; throws on z = 0 and on overflow.
Complex phi_dt(const PhiPlan& plan, Complex z);

/// Open-loop transfer function (loop_gain/2) (1+Phi)/(1-Phi) B(s) with the
/// first-order factor B(s) = omega_b/(s+omega_b). Throws eval_error on pole
/// proximity (|1-Phi| below 1e-300) and at s = -omega_b.
Complex open_loop_ct(const PhiPlan& plan, Complex s);

/// Discrete-time open loop with the backward-Euler factor
/// omega_b T z / ((1+omega_b T) z - 1).
Complex open_loop_dt(const PhiPlan& plan, Complex z);

struct SensitivityPair {
  Complex sensitivity;       ///< S = 1/(1+Gamma)
  Complex comp_sensitivity;  ///< T = Gamma/(1+Gamma)
};

/// Throws eval_error when the open-loop value equals -1.
SensitivityPair sensitivity_pair(Complex open_loop);

/// Strictly increasing frequency grid from a spec. Log spacing requires
/// min > 0; count must be >= 2.
std::vector<double> make_grid(const GridSpec& spec);

/// Default grids: dt is 20001 log points on (1e-4, pi]; ct is 20001 log
/// points on (1e-4*omega0, 100*omega_b].
GridSpec default_grid(const HyperParams& p, Representation rep);

/// Evaluates Gamma, S, T over the grid. dt grids must lie in (0, pi]; ct
/// grid starts are clamped to at least 1e-12. Pole-proximity failures flag
/// the row instead of aborting.
ResponseTable bode_table(const PhiPlan& plan, Representation rep,
                         const GridSpec& grid);

}  // namespace qdob
