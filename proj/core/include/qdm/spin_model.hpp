#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "qdm/constants.hpp"

namespace qdm::spin {

/// NV ensemble spin constants. Angular quantities (zfs, mz) in rad/s;
/// a_hf in Hz; times in seconds.
struct NVParams {
  double zfs = constants::nv_zfs;      // zero-field splitting D, rad/s
  double mz = 0.0;                     // longitudinal stress shift, rad/s
  double gamma = constants::gamma_nv;  // rad/(s T)
  double a_hf = 3.05e6;                // 15N hyperfine splitting of the resonance, Hz
  double t2_star = 2.2e-6;             // s
  double decay_p = 1.0;                // envelope shape exponent
  double contrast = 0.03;              // readout contrast C at tau = 0
  double t_init_readout = 7.04e-6;     // s, combined initialization + readout
  double tau = 2.29e-6;                // s, Ramsey free evolution interval

  void validate() const;
};

/// Resonance frequencies of the 0 -> +/-1 transitions (Hz) at axial field Bz:
/// fitting the spin-1 Hamiltonian H/hbar = (D + Mz) Sz^2 + gamma Bz Sz.
struct Resonances {
  double f_plus;   // Hz
  double f_minus;  // Hz
};
Resonances nv_resonances(const NVParams& p, double bz_tesla);

/// Relative phase accumulated between m_s = +1 and -1 during free
/// evolution: 2 gamma B tau (radians).
double dq_phase(double b_sig_tesla, double tau_s, double gamma = constants::gamma_nv);

/// Normalized Ramsey fringe signal at detuning f (Hz):
/// S(tau) = C exp(-(tau/T2*)^p) * (1/2) sum_{k=+-1} cos(2 pi (f + k A/2) tau).
double ramsey_signal_at(const NVParams& p, double detuning_hz, double tau_s);
std::vector<double> ramsey_signal(const NVParams& p, double detuning_hz,
                                  const std::vector<double>& tau_grid);

/// Envelope factor exp(-(tau/T2*)^p).
double ramsey_envelope(const NVParams& p, double tau_s);

// ---------------------------------------------------------------------------
// DQ 4-Ramsey

enum class TonePhase { plus_x, minus_x };
enum class LockinChannel { in_phase, quadrature };

/// One of the four phase-alternated DQ Ramsey measurements: phase of the
/// upper (0 -> +1) and lower (0 -> -1) MW tone, and the camera channel the
/// exposure is routed to.
struct DqMeasurement {
  TonePhase tone_upper;
  TonePhase tone_lower;
  LockinChannel channel;
};

using Dq4Pattern = std::array<DqMeasurement, 4>;

/// Phase alternation pattern. The in-phase pattern gives DQ polarity
/// (+,-,+,-); the quadrature pattern is the permutation with opposite
/// polarity per entry.
Dq4Pattern dq4_pattern(LockinChannel channel);

/// DQ fringe polarity (+1/-1) implied by a measurement's phase settings.
int dq_polarity(const DqMeasurement& m);

/// S1 - S2 + S3 - S4. Cancels any common-mode term and any single-quantum
/// artifact split equally between (S1+S3) and (S2+S4).
double dq4ramsey_normalize(double s1, double s2, double s3, double s4);

/// The four measurement signals at differential tone detuning delta (Hz):
/// +delta on the upper tone, -delta on the lower. The model operates at the
/// quadrature point of the DQ fringe, with both 15N hyperfine components
/// weighted equally. `common_mode` and `sq_artifact` inject the error terms
/// the phase alternation is designed to cancel.
std::array<double, 4> dq4_signals(const NVParams& p, double delta_hz,
                                  double common_mode = 0.0, double sq_artifact = 0.0,
                                  LockinChannel channel = LockinChannel::in_phase);

/// Composed S_norm(delta) of the ideal DQ 4-Ramsey model; odd in delta.
double dq4_snorm(const NVParams& p, double delta_hz);

struct MagnetometryCurve {
  std::vector<double> delta_hz;  // differential detuning grid
  std::vector<double> s_norm;    // composed signal
  double delta_opt_hz = 0.0;     // detuning maximizing |dS/dB|
  double slope_opt = 0.0;        // dS_norm/dB at the optimum, 1/T (signed)
};

/// Evaluates a fringe model S(delta) on the grid and locates the operating
/// point by maximizing |dS/dB| with centered finite differences, where
/// delta = (gamma/2pi) B per tone. Throws if the extremum is not bracketed
/// by interior grid points.
MagnetometryCurve magnetometry_curve_for_model(
    const std::function<double(double)>& s_of_delta,
    const std::vector<double>& delta_grid_hz, double gamma = constants::gamma_nv);

/// The curve of the built-in DQ 4-Ramsey model.
MagnetometryCurve magnetometry_curve(const NVParams& p,
                                     const std::vector<double>& delta_grid_hz);

// ---------------------------------------------------------------------------
// Dephasing budget

/// Concentration-driven dephasing budget for the NV ensemble.
struct NVConcentrations {
  double nv_par_ppm = 0.59;       // sensing-axis group
  double nv_nonpar_ppm = 1.77;    // other three groups
  double a_par = 0.247e6;         // s^-1 ppm^-1
  double a_nonpar = 0.165e6;      // s^-1 ppm^-1
  double zeta = 0.0;              // off-axis initialization factor, [0, 1]
  double c13_t2 = 200e-6;         // s
  double bias_grad_t2 = 850e-6;   // s
};

/// NV-NV interaction limited T2*:
/// 1/T2* = A_par [NV_par] + zeta A_nonpar [NV_nonpar] + 1/T2*{13C} + 1/T2*{bias};
/// halved when sensing in the doubly field-sensitive DQ basis.
double t2star_nv_limit(const NVConcentrations& c, bool dq);

}  // namespace qdm::spin
