#pragma once

#include <numbers>

// Physical constants (SI, CODATA 2018). All internal quantities in this
// library are SI: tesla, second, metre, hertz, radian. Display-unit
// conversion happens only at CLI/report boundaries.
namespace qdm::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double planck_h = 6.62607015e-34;   // J s
inline constexpr double mu_bohr = 9.2740100783e-24;  // J/T
inline constexpr double mu_nuclear = 5.0507837461e-27;  // J/T
inline constexpr double mu0 = 1.25663706212e-6;      // T m / A

// NV electron gyromagnetic ratio, angular: gamma/2pi = 28.024 GHz/T.
inline constexpr double gamma_nv_hz_per_t = 28.024e9;
inline constexpr double gamma_nv = two_pi * gamma_nv_hz_per_t;  // rad/(s T)

// Free electron. gamma_e/2pi = 28.0249 GHz/T.
inline constexpr double g_free_electron = 2.00231930436;
inline constexpr double gamma_e = g_free_electron * mu_bohr / hbar;  // rad/(s T)

// NV electronic g factor used in the shot-noise sensitivity prefactor.
inline constexpr double g_nv = 2.003;

// NV zero-field splitting, angular (2pi x 2.87 GHz).
inline constexpr double nv_zfs = two_pi * 2.87e9;  // rad/s

}  // namespace qdm::constants
