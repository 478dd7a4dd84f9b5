#include "qdm/bath.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace qdm::bath {

namespace {

using constants::planck_h;
using Matrix4c = Eigen::Matrix4cd;
using constants::mu_bohr;
using constants::mu_nuclear;
const std::complex<double> I{0.0, 1.0};

// Spin-1/2 operators (units of hbar set to 1; dimensionless spin vectors).
Eigen::Matrix2cd sx() {
  Eigen::Matrix2cd m;
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}
Eigen::Matrix2cd sy() {
  Eigen::Matrix2cd m;
  m << 0.0, -0.5 * I, 0.5 * I, 0.0;
  return m;
}
Eigen::Matrix2cd sz() {
  Eigen::Matrix2cd m;
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

/// H/h in Hz for the coupled electron-nuclear system.
Matrix4c p1_hamiltonian(const P1Params& p) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Matrix4c Sx = kron(sx(), id), Sy = kron(sy(), id), Sz = kron(sz(), id);
  const Matrix4c Ix = kron(id, sx()), Iy = kron(id, sy()), Iz = kron(id, sz());
  const double eb = mu_bohr / planck_h;   // Hz/T
  const double nb = mu_nuclear / planck_h;  // Hz/T
  Matrix4c h = eb * (p.g_perp * p.b_field.x * Sx + p.g_perp * p.b_field.y * Sy +
                     p.g_par * p.b_field.z * Sz);
  h += nb * (p.b_field.x * Ix + p.b_field.y * Iy + p.b_field.z * Iz);
  h += p.a_perp * (Sx * Ix + Sy * Iy) + p.a_par * (Sz * Iz);
  return h;
}

}  // namespace

std::vector<Transition> p1_transitions(const P1Params& p) {
  const Matrix4c h = p1_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h);
  const Eigen::Vector4d ev = solver.eigenvalues();
  const Matrix4c vec = solver.eigenvectors();
  const Matrix4c Sx = kron(sx(), Eigen::Matrix2cd::Identity());

  struct Pair {
    double freq;
    double weight;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const std::complex<double> elem = vec.col(j).adjoint() * Sx * vec.col(i);
      pairs.push_back({std::abs(ev[j] - ev[i]), std::norm(elem)});
    }
  }
  // The four electron-spin transitions are the strongest S_x couplings;
  // ties (vanishing weights) break toward the higher-frequency pair so the
  // first-order forbidden lines beat the nuclear ones in decoupled limits.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.freq > b.freq;
  });
  pairs.resize(4);
  const double w_max = pairs.front().weight;
  std::vector<Transition> out;
  out.reserve(4);
  for (const Pair& q : pairs) {
    out.push_back({q.freq, q.weight, w_max > 0.0 && q.weight > 0.5 * w_max});
  }
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) {
              return a.frequency_hz < b.frequency_hz;
            });
  return out;
}

double electron_line(const Vec3& b_field) {
  return constants::gamma_e / constants::two_pi * b_field.norm();
}

Spectrum deer_spectrum(const std::vector<SpectralLine>& lines,
                       const std::vector<double>& grid_hz) {
  for (const auto& l : lines) {
    if (l.width_hz <= 0.0) throw std::invalid_argument("deer_spectrum: width must be positive");
    if (l.weight < 0.0) throw std::invalid_argument("deer_spectrum: weight must be non-negative");
  }
  Spectrum sp;
  sp.lines = lines;
  sp.frequency_hz = grid_hz;
  sp.amplitude.assign(grid_hz.size(), 0.0);
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    const double f = grid_hz[i];
    double acc = 0.0;
    for (const auto& l : lines) {
      const double d = f - l.center_hz;
      acc += l.weight * l.width_hz * l.width_hz / (d * d + l.width_hz * l.width_hz);
    }
    sp.amplitude[i] = acc;
  }
  return sp;
}

std::vector<double> default_spectrum_grid(const std::vector<SpectralLine>& lines) {
  if (lines.empty()) throw std::invalid_argument("default_spectrum_grid: no lines");
  double lo = lines.front().center_hz, hi = lo;
  for (const auto& l : lines) {
    lo = std::min(lo, l.center_hz);
    hi = std::max(hi, l.center_hz);
  }
  lo -= 20e6;
  hi += 20e6;
  const double step = 10e3;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
  return grid;
}

double driven_t2star(const DriveParams& d) {
  if (d.omega_c_hz <= 0.0 || d.t2_bath_limited <= 0.0 || d.t2_nv_limited <= 0.0) {
    throw std::invalid_argument("driven_t2star: parameters must be positive");
  }
  const double x = d.rabi_hz / d.omega_c_hz;
  const double rate = 1.0 / d.t2_nv_limited + (1.0 / d.t2_bath_limited) / (1.0 + x * x);
  return 1.0 / rate;
}

double calibrate_omega_c(double t2_nv_limited, double t2_undriven, double rabi_hz,
                         double t2_target) {
  if (t2_undriven >= t2_nv_limited) {
    throw std::invalid_argument("calibrate_omega_c: undriven T2* must lie below the NV limit");
  }
  if (t2_target <= t2_undriven || t2_target >= t2_nv_limited) {
    throw std::invalid_argument("calibrate_omega_c: target T2* must lie between the limits");
  }
  const double bath_rate = 1.0 / t2_undriven - 1.0 / t2_nv_limited;
  DriveParams d;
  d.rabi_hz = rabi_hz;
  d.t2_nv_limited = t2_nv_limited;
  d.t2_bath_limited = 1.0 / bath_rate;
  // T2*(Omega) grows monotonically with omega_c decreasing, so bisect.
  double lo = rabi_hz * 1e-6, hi = rabi_hz * 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    d.omega_c_hz = mid;
    if (driven_t2star(d) > t2_target) {
      lo = mid;  // too little suppression left: omega_c too small
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace qdm::bath
