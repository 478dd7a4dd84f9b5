#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <complex>

#include "qdm/bath.hpp"
#include "qdm/constants.hpp"
#include "qdm/rng.hpp"

using namespace qdm;
using namespace qdm::bath;
using qdm::constants::mu_bohr;
using qdm::constants::mu_nuclear;
using qdm::constants::planck_h;

namespace {

// Independent brute-force oracle: the 4x4 Hamiltonian assembled from
// scalar spin-1/2 matrix elements over the product basis |mS, mI>, with
// mS, mI in {+1/2, -1/2}. No shared code with the implementation.
using cd = std::complex<double>;

cd elem_sx(double mp, double m) { return std::abs(mp - m) == 1.0 ? cd{0.5, 0.0} : cd{0.0, 0.0}; }
cd elem_sy(double mp, double m) {
  return std::abs(mp - m) == 1.0 ? cd{0.0, 0.5 * (m - mp)} : cd{0.0, 0.0};
}
cd elem_sz(double mp, double m) { return mp == m ? cd{m, 0.0} : cd{0.0, 0.0}; }

Eigen::Matrix4cd oracle_hamiltonian(const P1Params& p) {
  const double half[2] = {0.5, -0.5};
  const double eb = mu_bohr / planck_h;
  const double nb = mu_nuclear / planck_h;
  Eigen::Matrix4cd h;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double msp = half[r / 2], mip = half[r % 2];
      const double ms = half[c / 2], mi = half[c % 2];
      cd v{0.0, 0.0};
      const cd del_s = (msp == ms) ? cd{1.0, 0.0} : cd{0.0, 0.0};
      const cd del_i = (mip == mi) ? cd{1.0, 0.0} : cd{0.0, 0.0};
      // electron Zeeman with diagonal g tensor
      v += eb * (p.g_perp * p.b_field.x * elem_sx(msp, ms) * del_i +
                 p.g_perp * p.b_field.y * elem_sy(msp, ms) * del_i +
                 p.g_par * p.b_field.z * elem_sz(msp, ms) * del_i);
      // nuclear Zeeman (no g factor, as modelled)
      v += nb * (p.b_field.x * elem_sx(mip, mi) * del_s +
                 p.b_field.y * elem_sy(mip, mi) * del_s +
                 p.b_field.z * elem_sz(mip, mi) * del_s);
      // hyperfine S.A.I with diagonal A
      v += p.a_perp * (elem_sx(msp, ms) * elem_sx(mip, mi) +
                       elem_sy(msp, ms) * elem_sy(mip, mi));
      v += p.a_par * elem_sz(msp, ms) * elem_sz(mip, mi);
      h(r, c) = v;
    }
  }
  return h;
}

std::vector<double> oracle_transitions(const P1Params& p) {
  const Eigen::Matrix4cd h = oracle_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h);
  const Eigen::Vector4d ev = solver.eigenvalues();
  const Eigen::Matrix4cd vec = solver.eigenvectors();
  Eigen::Matrix4cd sx = Eigen::Matrix4cd::Zero();
  const double half[2] = {0.5, -0.5};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (r % 2 == c % 2) sx(r, c) = elem_sx(half[r / 2], half[c / 2]);
    }
  }
  struct P {
    double f, w;
  };
  std::vector<P> pairs;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const cd e = vec.col(j).adjoint() * sx * vec.col(i);
      pairs.push_back({std::abs(ev[j] - ev[i]), std::norm(e)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const P& a, const P& b) {
    if (a.w != b.w) return a.w > b.w;
    return a.f > b.f;
  });
  pairs.resize(4);
  std::vector<double> freqs;
  for (const auto& q : pairs) freqs.push_back(q.f);
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

}  // namespace

TEST_CASE("hamiltonian is exactly hermitian") {
  const CounterRng rng(3);
  for (std::size_t i = 0; i < 30; ++i) {
    P1Params p;
    p.b_field = {8e-3 * (rng.uniform(0, i) - 0.5), 8e-3 * (rng.uniform(1, i) - 0.5),
                 8e-3 * (rng.uniform(2, i) - 0.5)};
    const Eigen::Matrix4cd h = oracle_hamiltonian(p);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("decoupled limit A = 0: both allowed lines at g muB |B| / h") {
  P1Params p;
  p.a_perp = 0.0;
  p.a_par = 0.0;
  p.b_field = {0.0, 0.0, 4.278e-3};
  const auto tr = p1_transitions(p);
  REQUIRE(tr.size() == 4);
  const double f_zeeman = 2.0 * mu_bohr / planck_h * 4.278e-3;
  int allowed_at_zeeman = 0;
  for (const auto& t : tr) {
    if (t.allowed) {
      CHECK(t.frequency_hz == doctest::Approx(f_zeeman).epsilon(1e-9));
      CHECK(t.weight == doctest::Approx(0.25));
      ++allowed_at_zeeman;
    } else {
      CHECK(t.weight == doctest::Approx(0.0));
    }
  }
  CHECK(allowed_at_zeeman == 2);
}

TEST_CASE("B = 0 with isotropic A: allowed singlet-triplet lines at |A|") {
  // The triplet is internally degenerate at B = 0, so zero-frequency
  // intra-triplet pairs also carry S_x weight; every allowed transition at
  // a nonzero frequency must sit at the singlet-triplet splitting |A|.
  P1Params p;
  p.a_perp = -120e6;
  p.a_par = -120e6;
  p.b_field = {0.0, 0.0, 0.0};
  const auto tr = p1_transitions(p);
  int at_splitting = 0;
  for (const auto& t : tr) {
    if (t.allowed && t.frequency_hz > 1e3) {
      CHECK(t.frequency_hz == doctest::Approx(120e6).epsilon(1e-9));
      ++at_splitting;
    }
  }
  CHECK(at_splitting >= 1);
}

TEST_CASE("default tensors at 4.278 mT match the brute-force oracle within 1 kHz") {
  P1Params p;
  p.b_field = {0.0, 0.0, 4.278e-3};
  const auto tr = p1_transitions(p);
  const auto oracle = oracle_transitions(p);
  REQUIRE(tr.size() == oracle.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(std::abs(tr[i].frequency_hz - oracle[i]) < 1e3);
  }
}

TEST_CASE("transitions match the oracle for 100 random field orientations") {
  const CounterRng rng(41);
  for (std::size_t i = 0; i < 100; ++i) {
    P1Params p;
    const double mag = 1e-3 + 9e-3 * rng.uniform(0, i);
    const double cos_t = 2.0 * rng.uniform(1, i) - 1.0;
    const double sin_t = std::sqrt(1.0 - cos_t * cos_t);
    const double phi = constants::two_pi * rng.uniform(2, i);
    p.b_field = {mag * sin_t * std::cos(phi), mag * sin_t * std::sin(phi), mag * cos_t};
    const auto tr = p1_transitions(p);
    const auto oracle = oracle_transitions(p);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(tr[k].frequency_hz - oracle[k]) < 1e3);
    }
  }
}

TEST_CASE("electron line values and linearity") {
  CHECK(electron_line({0, 0, 0}) == 0.0);
  CHECK(electron_line({0, 0, 4.278e-3}) == doctest::Approx(119.9e6).epsilon(1e-3));
  CHECK(electron_line({0, 0, 8.556e-3}) ==
        doctest::Approx(2.0 * electron_line({0, 0, 4.278e-3})));
}

TEST_CASE("deer_spectrum Lorentzian anchors and linearity in weights") {
  const std::vector<SpectralLine> one{{100e6, 1e6, 0.8}};
  const Spectrum s = deer_spectrum(one, {100e6, 101e6, 200e6});
  CHECK(s.amplitude[0] == doctest::Approx(0.8));          // at f0
  CHECK(s.amplitude[1] == doctest::Approx(0.4));          // at f0 + w: half
  CHECK(s.amplitude[2] < 0.8 * 1e-3);                     // far off resonance
  // two equal lines far apart resolve as equal peaks
  const std::vector<SpectralLine> two{{100e6, 1e6, 0.5}, {180e6, 1e6, 0.5}};
  const Spectrum s2 = deer_spectrum(two, {100e6, 180e6});
  CHECK(s2.amplitude[0] == doctest::Approx(s2.amplitude[1]).epsilon(0.01));
  // linearity in weights
  std::vector<SpectralLine> scaled = two;
  for (auto& l : scaled) l.weight *= 3.0;
  const Spectrum s3 = deer_spectrum(scaled, {100e6, 140e6, 180e6});
  const Spectrum s1 = deer_spectrum(two, {100e6, 140e6, 180e6});
  for (std::size_t i = 0; i < s3.amplitude.size(); ++i) {
    CHECK(s3.amplitude[i] == doctest::Approx(3.0 * s1.amplitude[i]));
  }
}

TEST_CASE("default spectrum grid covers the lines with 20 MHz margins") {
  const std::vector<SpectralLine> lines{{60e6, 1e6, 1.0}, {120e6, 1e6, 0.5}};
  const auto grid = default_spectrum_grid(lines);
  CHECK(grid.front() == doctest::Approx(40e6));
  CHECK(grid.back() == doctest::Approx(140e6).epsilon(1e-3));
  CHECK(grid[1] - grid[0] == doctest::Approx(10e3));
}

TEST_CASE("driven_t2star limits and monotonicity") {
  DriveParams d;
  d.t2_nv_limited = 2.5e-6;
  d.t2_bath_limited = 2.3077e-6;
  d.omega_c_hz = 0.76e6;
  d.rabi_hz = 0.0;
  const double undriven = 1.0 / (1.0 / d.t2_nv_limited + 1.0 / d.t2_bath_limited);
  CHECK(driven_t2star(d) == doctest::Approx(undriven));
  d.rabi_hz = 1e12;
  CHECK(driven_t2star(d) == doctest::Approx(d.t2_nv_limited).epsilon(1e-6));
  double prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    d.rabi_hz = 1e4 * static_cast<double>(i * i);
    const double t2 = driven_t2star(d);
    CHECK(t2 >= prev);
    prev = t2;
  }
}

TEST_CASE("omega_c calibrated to the measured driven/undriven pair") {
  // 2 MHz drive lifts T2* from 1.2 us to 2.2 us with a 2.5 us NV limit.
  const double omega_c = calibrate_omega_c(2.5e-6, 1.2e-6, 2e6, 2.2e-6);
  DriveParams d;
  d.rabi_hz = 2e6;
  d.omega_c_hz = omega_c;
  d.t2_nv_limited = 2.5e-6;
  d.t2_bath_limited = 1.0 / (1.0 / 1.2e-6 - 1.0 / 2.5e-6);
  CHECK(driven_t2star(d) == doctest::Approx(2.2e-6).epsilon(1e-9));
  // against the closed-form inversion
  const double bath_rate = 1.0 / 1.2e-6 - 1.0 / 2.5e-6;
  const double x2 = bath_rate / (1.0 / 2.2e-6 - 1.0 / 2.5e-6) - 1.0;
  CHECK(omega_c == doctest::Approx(2e6 / std::sqrt(x2)).epsilon(1e-6));
}
