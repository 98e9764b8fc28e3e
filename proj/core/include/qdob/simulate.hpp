#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qdob/filter_design.hpp"

namespace qdob {

/// Strictly proper rational plant in s with a monic denominator. num holds
/// b_0..b_n (ascending powers), den holds a_0..a_{m-1}; the leading s^m
/// coefficient is an implicit 1.
struct NominalPlant {
  std::vector<double> num;
  std::vector<double> den;

  int numerator_degree() const { return static_cast<int>(num.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(den.size()); }
  /// Checks strict properness, relative degree 1, and that all zeros and
  /// poles lie strictly in the open left half-plane. Throws config_error.
  void validate() const;
};

/// First-order lag over the unit step, the stock plant 1/(s+1).
NominalPlant default_plant();

/// Rational transfer function in z^-1 with a[0] normalized to 1.
struct DiscreteTf {
  std::vector<double> b;
  std::vector<double> a;

  double feedthrough() const { return b.empty() ? 0.0 : b.front(); }
};

/// Backward-Euler image of num(s)/den(s) under s -> (1 - z^-1)/T. Throws
/// config_error when the discretized denominator degenerates.
DiscreteTf backward_euler(std::span<const double> num,
                          std::span<const double> den, double sample_time);

struct PlantDiscretization {
  DiscreteTf plant;          ///< simulated plant P_n
  DiscreteTf observer_path;  ///< B * P_n^-1 feeding the estimator
};

PlantDiscretization discretize_plant(const NominalPlant& plant,
                                     const HyperParams& p);

struct HarmonicComponent {
  int index = 1;        ///< harmonic number n >= 0
  double amplitude = 1;
  double phase = 0;           ///< carrier phase [rad]
  double envelope_phase = 0;  ///< modulation phase [rad]
};

/// Harmonic mix whose amplitudes breathe at envelope_rate, which must stay
/// below rho to keep the lifted spectrum inside the separation band.
struct DisturbanceSpec {
  std::vector<HarmonicComponent> harmonics;
  double envelope_rate = 0;   ///< nu [rad/s]
  double envelope_depth = 0;  ///< in [0, 1)

  void validate(const HyperParams& p) const;
};

/// d(kT) = sum_h A_h (1 + depth sin(nu kT + psi_h)) cos(n_h omega0 kT + phi_h).
std::vector<double> make_disturbance(const DisturbanceSpec& spec,
                                     const HyperParams& p,
                                     std::size_t samples);

struct QuasiperiodicityCheck {
  double in_band_fraction = 0;  ///< min over lift offsets, in [0, 1]
  bool quasiperiodic = false;
};

/// Lifts the samples period by period at every offset, takes the DFT of
/// each lifted sequence, and reports the worst in-band energy fraction
/// (|Omega| <= rho*L). Requires at least 8 whole periods and a sample count
/// divisible by Lbar; throws config_error otherwise. A zero signal counts
/// as fraction 1.
QuasiperiodicityCheck check_quasiperiodic(std::span<const double> samples,
                                          const HyperParams& p,
                                          double energy_threshold);

/// Sampled closed-loop record; all columns share one length and the time
/// column advances by sample_time per row.
struct SimTrace {
  double sample_time = 0;
  std::vector<double> time;
  std::vector<double> reference;
  std::vector<double> disturbance;
  std::vector<double> control;
  std::vector<double> output;
  std::vector<double> estimate;

  std::size_t size() const { return time.size(); }
};

/// Sparse FIR cascade plus trailing delay realizing the tap plan on a
/// sample stream. The output at step k depends on inputs up to k - kappa
/// only, so pending_output() may be read before advance() for the step.
class PhiFilter {
 public:
  explicit PhiFilter(const PhiPlan& plan);

  double pending_output() const { return kappa_line_[kappa_pos_]; }
  void advance(double input);

  std::size_t stage_line_length(std::size_t stage) const;
  std::size_t kappa_line_length() const { return kappa_line_.size(); }

 private:
  struct Stage {
    std::vector<double> taps;  ///< normalized, ascending delay order
    int spacing = 1;
    std::vector<double> line;
    std::size_t pos = 0;
  };
  std::vector<Stage> stages_;
  std::vector<double> kappa_line_;
  std::size_t kappa_pos_ = 0;
};

/// Runs the observer loop on a disturbance record with a constant
/// reference. Every step resolves the loop algebra exactly: the only
/// same-step coupling is a scalar relation because all filter paths through
/// the cascade are delayed by kappa >= 1 samples. Throws eval_error with
/// the step index if the loop diverges. With observer_enabled = false the
/// estimate is forced to zero (plain open loop).
SimTrace run_closed_loop(const NominalPlant& plant, const PhiPlan& plan,
                         std::span<const double> disturbance,
                         double reference, std::size_t steps,
                         bool observer_enabled = true);

struct HarmonicAttenuation {
  int harmonic = 0;
  bool valid = false;       ///< false when n*omega0 is at or above Nyquist
  double measured_db = 0;   ///< closed-loop vs open-loop output amplitude
};

/// Discards the leading fraction of both traces, trims to whole periods,
/// and compares the Fourier amplitude of the output at each harmonic
/// between the closed- and open-loop runs. Requires more than 10 periods.
std::vector<HarmonicAttenuation> suppression_metrics(
    const SimTrace& closed, const SimTrace& open, const HyperParams& p,
    std::span<const int> harmonics, double discard_fraction = 0.5);

}  // namespace qdob
