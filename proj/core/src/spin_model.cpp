#include "qdm/spin_model.hpp"

#include <cmath>
#include <stdexcept>

namespace qdm::spin {

using constants::two_pi;

void NVParams::validate() const {
  if (t2_star <= 0.0) throw std::invalid_argument("NVParams: T2* must be positive");
  if (contrast <= 0.0 || contrast >= 1.0) {
    throw std::invalid_argument("NVParams: contrast must be in (0, 1)");
  }
  if (decay_p <= 0.0) throw std::invalid_argument("NVParams: decay exponent must be positive");
  if (tau < 0.0) throw std::invalid_argument("NVParams: tau must be non-negative");
}

Resonances nv_resonances(const NVParams& p, double bz_tesla) {
  const double center = (p.zfs + p.mz) / two_pi;
  const double zeeman = p.gamma / two_pi * bz_tesla;
  return {center + zeeman, center - zeeman};
}

double dq_phase(double b_sig_tesla, double tau_s, double gamma) {
  if (tau_s < 0.0) throw std::invalid_argument("dq_phase: tau must be non-negative");
  return 2.0 * gamma * b_sig_tesla * tau_s;
}

double ramsey_envelope(const NVParams& p, double tau_s) {
  return std::exp(-std::pow(tau_s / p.t2_star, p.decay_p));
}

double ramsey_signal_at(const NVParams& p, double detuning_hz, double tau_s) {
  if (tau_s < 0.0) throw std::invalid_argument("ramsey_signal: tau must be non-negative");
  const double osc = 0.5 * (std::cos(two_pi * (detuning_hz + 0.5 * p.a_hf) * tau_s) +
                            std::cos(two_pi * (detuning_hz - 0.5 * p.a_hf) * tau_s));
  return p.contrast * ramsey_envelope(p, tau_s) * osc;
}

std::vector<double> ramsey_signal(const NVParams& p, double detuning_hz,
                                  const std::vector<double>& tau_grid) {
  std::vector<double> out(tau_grid.size());
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    out[i] = ramsey_signal_at(p, detuning_hz, tau_grid[i]);
  }
  return out;
}

Dq4Pattern dq4_pattern(LockinChannel channel) {
  using enum TonePhase;
  if (channel == LockinChannel::in_phase) {
    return {DqMeasurement{plus_x, plus_x, LockinChannel::in_phase},
            DqMeasurement{plus_x, minus_x, LockinChannel::in_phase},
            DqMeasurement{minus_x, minus_x, LockinChannel::in_phase},
            DqMeasurement{minus_x, plus_x, LockinChannel::in_phase}};
  }
  // Permuted so each entry has opposite DQ polarity to the in-phase pattern.
  return {DqMeasurement{plus_x, minus_x, LockinChannel::quadrature},
          DqMeasurement{plus_x, plus_x, LockinChannel::quadrature},
          DqMeasurement{minus_x, plus_x, LockinChannel::quadrature},
          DqMeasurement{minus_x, minus_x, LockinChannel::quadrature}};
}

int dq_polarity(const DqMeasurement& m) {
  return m.tone_upper == m.tone_lower ? +1 : -1;
}

double dq4ramsey_normalize(double s1, double s2, double s3, double s4) {
  return s1 - s2 + s3 - s4;
}

namespace {

/// Quadrature-point DQ fringe vs differential detuning, hyperfine-averaged:
/// mean_k sin(2 pi (2 delta + k A/2) tau) = sin(4 pi delta tau) cos(pi A tau).
double dq_fringe(const NVParams& p, double delta_hz) {
  return 0.5 * (std::sin(two_pi * (2.0 * delta_hz + 0.5 * p.a_hf) * p.tau) +
                std::sin(two_pi * (2.0 * delta_hz - 0.5 * p.a_hf) * p.tau));
}

}  // namespace

std::array<double, 4> dq4_signals(const NVParams& p, double delta_hz, double common_mode,
                                  double sq_artifact, LockinChannel channel) {
  const Dq4Pattern pattern = dq4_pattern(channel);
  const double amp = 0.5 * p.contrast * ramsey_envelope(p, p.tau);
  const double fringe = dq_fringe(p, delta_hz);
  std::array<double, 4> s{};
  for (std::size_t i = 0; i < 4; ++i) {
    s[i] = common_mode + dq_polarity(pattern[i]) * amp * fringe;
  }
  // SQ pulse-error artifacts land equally in (S1 + S3) and (S2 + S4).
  s[0] += 0.5 * sq_artifact;
  s[2] += 0.5 * sq_artifact;
  s[1] += 0.5 * sq_artifact;
  s[3] += 0.5 * sq_artifact;
  return s;
}

double dq4_snorm(const NVParams& p, double delta_hz) {
  const auto s = dq4_signals(p, delta_hz);
  return dq4ramsey_normalize(s[0], s[1], s[2], s[3]);
}

MagnetometryCurve magnetometry_curve_for_model(
    const std::function<double(double)>& s_of_delta,
    const std::vector<double>& delta_grid_hz, double gamma) {
  if (delta_grid_hz.size() < 5) {
    throw std::invalid_argument("magnetometry_curve: need at least 5 grid points");
  }
  MagnetometryCurve curve;
  curve.delta_hz = delta_grid_hz;
  curve.s_norm.resize(delta_grid_hz.size());
  for (std::size_t i = 0; i < delta_grid_hz.size(); ++i) {
    curve.s_norm[i] = s_of_delta(delta_grid_hz[i]);
  }
  // delta = (gamma/2pi) B per tone, so B(delta) = 2 pi delta / gamma.
  const double db_dd = two_pi / gamma;
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 1; i + 1 < curve.s_norm.size(); ++i) {
    const double db = (curve.delta_hz[i + 1] - curve.delta_hz[i - 1]) * db_dd;
    const double slope = (curve.s_norm[i + 1] - curve.s_norm[i - 1]) / db;
    if (std::abs(slope) > best) {
      best = std::abs(slope);
      best_i = i;
      curve.slope_opt = slope;
      curve.delta_opt_hz = curve.delta_hz[i];
    }
  }
  if (best_i <= 1 || best_i + 2 >= curve.s_norm.size()) {
    throw std::runtime_error(
        "magnetometry_curve: slope extremum not bracketed by the grid; widen or refine it");
  }
  return curve;
}

MagnetometryCurve magnetometry_curve(const NVParams& p,
                                     const std::vector<double>& delta_grid_hz) {
  return magnetometry_curve_for_model([&p](double d) { return dq4_snorm(p, d); },
                                      delta_grid_hz, p.gamma);
}

double t2star_nv_limit(const NVConcentrations& c, bool dq) {
  if (c.nv_par_ppm < 0.0 || c.nv_nonpar_ppm < 0.0) {
    throw std::invalid_argument("t2star_nv_limit: concentrations must be non-negative");
  }
  if (c.a_par <= 0.0 || c.a_nonpar <= 0.0 || c.c13_t2 <= 0.0 || c.bias_grad_t2 <= 0.0) {
    throw std::invalid_argument("t2star_nv_limit: rate constants must be positive");
  }
  const double rate = c.a_par * c.nv_par_ppm + c.zeta * c.a_nonpar * c.nv_nonpar_ppm +
                      1.0 / c.c13_t2 + 1.0 / c.bias_grad_t2;
  const double t2 = 1.0 / rate;
  return dq ? 0.5 * t2 : t2;
}

}  // namespace qdm::spin
