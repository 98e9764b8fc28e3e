#pragma once

#include <vector>

#include "qdob/filter_design.hpp"
#include "qdob/freq_response.hpp"

namespace qdob {

/// Closed-form value of the sensitivity integral in the continuous-time
/// representation, -pi*omega_b*omega_c*L/4. Nonpositive for valid params.
double delta_ct_closed(const HyperParams& p);

/// Discrete-time counterpart,
/// 2*pi*ln(2+2*omega_b*T) - 2*pi*ln(2+2*omega_b*T+omega_b*omega_c*L*T).
double delta_dt_closed(const HyperParams& p);

/// Closed-form target annotated with the inputs that produced it.
struct TheoreticalValue {
  Representation representation = Representation::ct;
  double value = 0;
  double omega_b = 0;
  double omega_c = 0;
  double period = 0;
  double sample_time = 0;
};

TheoreticalValue theoretical_value(const HyperParams& p, Representation rep);

struct QuadConfig {
  double panel_abs_tol = 1e-8;  ///< absolute tolerance per forced panel
  int max_depth = 30;
  int sweep_points = 60;  ///< recorded partial-integral upper limits
};

/// Partial integrals of ln|S| versus the upper limit, with the closed-form
/// target. For dt the partials cover the half range [0, w] and `total`
/// reports the full-circle value 2 * partial(pi).
struct IntegralSweep {
  Representation representation = Representation::ct;
  std::vector<double> upper_limits;
  std::vector<double> partials;
  TheoreticalValue target;
  QuadConfig config;
  double total = 0;
  double error_estimate = 0;
  long evaluations = 0;
  int flagged_panels = 0;
};

/// Integrates ln|S(j*omega)| on [0, upper_limit] with forced panel
/// breakpoints at every harmonic n*omega0 and band edge n*omega0 +- rho.
IntegralSweep integrate_ln_s_ct(const PhiPlan& plan, double upper_limit,
                                const QuadConfig& config = {});

/// Integrates ln|S~(exp(j*Omega))| on [0, pi] with breakpoints at
/// n*omega0*T and (n*omega0 +- rho)*T; `total` is twice the half range.
IntegralSweep integrate_ln_s_dt(const PhiPlan& plan,
                                const QuadConfig& config = {});

/// Errors of the recorded partials against the target (relative when the
/// target is nonzero, absolute otherwise) plus a monotonicity flag that
/// distinguishes the omega_a << omega_b regime from the oscillating one.
/// For dt sweeps the compared quantity is the symmetric partial
/// 2 * partial(w), which converges to the target at w = pi.
struct ConvergenceReport {
  std::vector<double> upper_limits;
  std::vector<double> errors;
  bool relative = false;
  bool monotone = false;
  double final_error = 0;
};

ConvergenceReport convergence_report(const IntegralSweep& sweep);

}  // namespace qdob
