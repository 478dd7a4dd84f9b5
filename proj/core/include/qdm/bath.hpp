#pragma once

#include <vector>

#include "qdm/constants.hpp"
#include "qdm/vec3.hpp"

namespace qdm::bath {

/// Substitutional nitrogen (15N_s^0) ground-state parameters: S = 1/2
/// electron coupled to an I = 1/2 nucleus. Tensors are diagonal in the
/// NV-axis frame, g = diag(g_perp, g_perp, g_par), A likewise, A in Hz.
/// The hyperfine defaults follow the characterized sample; commonly
/// tabulated 15N_s^0 magnitudes (~114/160 MHz) differ, so override both
/// components when modelling other material.
struct P1Params {
  double g_perp = 2.0;
  double g_par = 2.0;
  double a_perp = -559.7e6;   // Hz
  double a_par = -113.83e6;   // Hz
  Vec3 b_field;               // tesla, NV-axis frame
};

struct Transition {
  double frequency_hz;
  double weight;    // |<f|Sx|i>|^2
  bool allowed;     // weight above half the strongest of the four
};

/// The four electron-spin transitions of the P1 center: eigenvalue
/// differences of the 4x4 Hamiltonian
///   H/h = (mu_B/h) B.g.S + (mu_N/h) B.I + S.A.I,
/// classified allowed/forbidden by the S_x matrix element between
/// eigenstates. Sorted by frequency.
std::vector<Transition> p1_transitions(const P1Params& p);

/// Free-electron spin resonance (gamma_e/2pi) |B|, Hz.
double electron_line(const Vec3& b_field);

struct SpectralLine {
  double center_hz;
  double width_hz;   // Lorentzian half width at half maximum
  double weight;     // peak amplitude
};

struct Spectrum {
  std::vector<double> frequency_hz;
  std::vector<double> amplitude;
  std::vector<SpectralLine> lines;
};

/// Sum of Lorentzians a w^2 / ((f - f0)^2 + w^2) on the given grid.
Spectrum deer_spectrum(const std::vector<SpectralLine>& lines,
                       const std::vector<double>& grid_hz);

/// Default grid: 10 kHz spacing over [f_min - 20 MHz, f_max + 20 MHz].
std::vector<double> default_spectrum_grid(const std::vector<SpectralLine>& lines);

/// Phenomenological effect of resonant bath driving on the NV dephasing
/// time: the bath-limited rate is suppressed by a Lorentzian in the bath
/// Rabi frequency,
///   1/T2*(Omega) = 1/T2*_NV + (1/T2*_bath) / (1 + (Omega/omega_c)^2).
struct DriveParams {
  double rabi_hz = 2e6;          // Omega
  double omega_c_hz = 0.759e6;   // crossover scale (model parameter)
  double t2_bath_limited = 2.3077e-6;  // s
  double t2_nv_limited = 2.5e-6;       // s
};

double driven_t2star(const DriveParams& d);

/// Solves for omega_c (by bisection) such that driving at `rabi_hz` yields
/// `t2_target` given the NV-limited and combined undriven dephasing times.
double calibrate_omega_c(double t2_nv_limited, double t2_undriven, double rabi_hz,
                         double t2_target);

}  // namespace qdm::bath
