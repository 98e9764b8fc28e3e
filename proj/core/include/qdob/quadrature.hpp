#pragma once

#include <functional>

namespace qdob {

/// Result of one 15-point Kronrod panel with the embedded 7-point Gauss
/// error estimate.
struct PanelEstimate {
  double value = 0;
  double error = 0;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b);

struct AdaptiveResult {
  double value = 0;
  double error = 0;       ///< sum of accepted panel error bounds
  long evaluations = 0;   ///< integrand evaluations
  int flagged = 0;        ///< subintervals that hit max_depth unconverged
};

/// Adaptive bisection of [a, b] until each panel's Gauss-Kronrod error
/// bound falls below its share of abs_tol or max_depth is reached.
/// Integrand exceptions propagate to the caller.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth);

}  // namespace qdob
