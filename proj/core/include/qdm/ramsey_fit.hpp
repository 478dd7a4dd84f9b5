#pragma once

#include <vector>

namespace qdm::spin {

/// Result of fitting S(tau) = C exp(-(tau/T2)^p) cos(2 pi f tau) cos(pi A tau)
/// to sampled Ramsey fringes. Uncertainties are 1-sigma from the parameter
/// covariance at the optimum.
struct RamseyFit {
  double t2_star = 0.0;      // s
  double detuning_hz = 0.0;  // f
  double a_hf_hz = 0.0;      // A
  double contrast = 0.0;     // C
  double decay_p = 1.0;      // p
  double t2_star_err = 0.0;
  double detuning_err = 0.0;
  double a_hf_err = 0.0;
  double contrast_err = 0.0;
  double decay_p_err = 0.0;
  double rmse = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Nonlinear least squares against the Ramsey fringe model (bounded
/// Levenberg-Marquardt with analytic Jacobian). Initial guesses come from
/// the discrete spectrum (detuning, hyperfine) and a log-envelope line fit
/// (T2*). Requires >= 8 samples spanning at least one decay constant;
/// throws on degenerate (constant) data. Non-convergence is reported via
/// the `converged` flag, never silently.
RamseyFit fit_ramsey(const std::vector<double>& tau_s,
                     const std::vector<double>& signal);

}  // namespace qdm::spin
