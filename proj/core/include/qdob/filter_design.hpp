#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qdob {

/// User-chosen observer knobs. omega0 fixes the disturbance period
/// L = 2*pi/omega0; rho in [0, pi/L) is the half-width of the stop band
/// around each harmonic.
struct HyperParams {
  double sample_time = 1e-3;  ///< T [s]
  double omega0 = 1.0;        ///< fundamental frequency [rad/s]
  double omega_a = 10.0;      ///< cascade cutoff frequency [rad/s]
  double omega_b = 100.0;     ///< first-order filter bandwidth [rad/s]
  double rho = 0.0;           ///< separation frequency [rad/s]
  int stages = 3;             ///< number of cascade stages, l >= 1
  int max_order = 256;        ///< order cap N_max >= 1

  double period() const;  ///< L = 2*pi/omega0 [s]
  /// Throws config_error when a field is out of its admissible range.
  void validate() const;
};

/// Deterministic identifier of a parameter set (FNV-1a over the fields).
std::uint64_t params_hash(const HyperParams& p);

/// One windowed-sinc stage. Taps are stored for n = -order..order with the
/// center tap at index `order`; they are even symmetric by construction.
struct StageSpec {
  int index = 0;             ///< 1-based position in the cascade
  double tap_spacing = 0;    ///< U_i [s]
  double cutoff = 0;         ///< omega_i [rad/s]
  int spacing_samples = 0;   ///< rounded spacing Ubar_i = round(U_i/T) >= 1
  std::vector<double> taps;  ///< alpha_i(n), size 2*order+1
  double gamma = 0;          ///< peak amplitude response, normalizer > 0
};

/// Fully resolved filter cascade plus the delay bookkeeping that makes the
/// total group delay equal to one rounded period.
struct PhiPlan {
  HyperParams params;
  std::vector<StageSpec> stages;
  int order = 0;           ///< N, shared by all stages
  int kappa = 0;           ///< trailing delay [samples], >= 1
  int period_samples = 0;  ///< Lbar = round(L/T)
  double omega_c = 0;      ///< separation gain [rad/s]

  /// omega_c * L, the loop gain constant.
  double loop_gain() const;
};

/// Blackman window, zero outside |n| <= order.
double blackman_weight(int n, int order);

/// Ideal low-pass impulse response sample sin(n*U*omega)/(n*pi), with the
/// n = 0 limit U*omega/pi.
double ideal_lowpass_tap(int n, double cutoff, double spacing);

/// omega_c = (2/L) tan(L*rho/2). Throws config_error for rho outside
/// [0, pi/L), where the tangent blows up.
double separation_gain(const HyperParams& p);

/// Spacings and cutoffs of the cascade recursion.
struct StageSchedule {
  std::vector<double> spacing;  ///< U_i [s]
  std::vector<double> cutoff;   ///< omega_i [rad/s]
  double contraction = 0;       ///< c = (T*omega_a/pi)^(1/l) / 2
};

StageSchedule stage_schedule(const HyperParams& p);

/// Largest admissible order floor((L-T)/sum U_i) clamped by max_order.
/// Throws config_error when no positive order fits in one period.
int order_select(const HyperParams& p, const StageSchedule& schedule);

/// Maximum of A(w) = taps[N] + 2*sum taps[N+n] cos(n*w) over w in [0, pi],
/// for an even-symmetric tap array of size 2N+1. The maximum is located to
/// machine precision via a dense grid plus golden-section polish.
double gamma_normalizer(std::span<const double> taps);

/// Builds the full plan: schedule, order, per-stage taps and normalizers,
/// rounded spacings, and the trailing delay kappa = Lbar - N*sum(Ubar_i).
/// Throws config_error when kappa < 1 or any rounded spacing is 0.
PhiPlan build_phi_plan(const HyperParams& p);

}  // namespace qdob
