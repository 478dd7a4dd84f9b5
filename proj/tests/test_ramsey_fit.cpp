#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qdm/ramsey_fit.hpp"
#include "qdm/rng.hpp"
#include "qdm/spin_model.hpp"

using namespace qdm;
using namespace qdm::spin;

namespace {

std::vector<double> tau_grid(std::size_t n, double span) {
  std::vector<double> tau(n);
  for (std::size_t i = 0; i < n; ++i) {
    tau[i] = span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return tau;
}

}  // namespace

TEST_CASE("noiseless round trip recovers the generating parameters") {
  NVParams gen;
  gen.t2_star = 2.2e-6;
  gen.contrast = 0.03;
  gen.a_hf = 3.05e6;
  const double detuning = 2.1e6;
  const auto tau = tau_grid(240, 6e-6);
  const auto sig = ramsey_signal(gen, detuning, tau);
  const RamseyFit fit = fit_ramsey(tau, sig);
  CHECK(fit.converged);
  CHECK(fit.t2_star == doctest::Approx(gen.t2_star).epsilon(1e-6));
  CHECK(fit.contrast == doctest::Approx(gen.contrast).epsilon(1e-6));
  CHECK(fit.decay_p == doctest::Approx(1.0).epsilon(1e-5));
  // (f, A) and (A/2, 2f) parameterize the same pair of tones.
  const bool direct = std::abs(fit.detuning_hz - detuning) < 1e-6 * detuning &&
                      std::abs(fit.a_hf_hz - gen.a_hf) < 1e-5 * gen.a_hf;
  const bool swapped = std::abs(fit.detuning_hz - 0.5 * gen.a_hf) < 10.0 &&
                       std::abs(fit.a_hf_hz - 2.0 * detuning) < 10.0;
  CHECK((direct || swapped));
  CHECK(fit.rmse < 1e-9);
}

TEST_CASE("stretched-exponential envelope round trip") {
  NVParams gen;
  gen.t2_star = 1.8e-6;
  gen.contrast = 0.05;
  gen.a_hf = 0.0;
  gen.decay_p = 1.6;
  const auto tau = tau_grid(200, 5e-6);
  const auto sig = ramsey_signal(gen, 1.5e6, tau);
  const RamseyFit fit = fit_ramsey(tau, sig);
  CHECK(fit.converged);
  CHECK(fit.t2_star == doctest::Approx(gen.t2_star).epsilon(1e-5));
  CHECK(fit.decay_p == doctest::Approx(1.6).epsilon(1e-4));
}

TEST_CASE("noisy recovery: T2* within 5% median over 100 seeds") {
  NVParams gen;
  gen.t2_star = 2.2e-6;
  gen.contrast = 0.03;
  const double detuning = 2.1e6;
  const auto tau = tau_grid(240, 6e-6);
  const auto clean = ramsey_signal(gen, detuning, tau);
  std::vector<double> rel_err;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CounterRng rng(seed);
    std::vector<double> noisy = clean;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      noisy[i] += 0.02 * gen.contrast * rng.normal(0, i);
    }
    const RamseyFit fit = fit_ramsey(tau, noisy);
    rel_err.push_back(std::abs(fit.t2_star - gen.t2_star) / gen.t2_star);
  }
  std::nth_element(rel_err.begin(), rel_err.begin() + 50, rel_err.end());
  CHECK(rel_err[50] < 0.05);
}

TEST_CASE("uncertainties scale with the noise level") {
  NVParams gen;
  gen.t2_star = 2.0e-6;
  gen.contrast = 0.04;
  const auto tau = tau_grid(240, 6e-6);
  const auto clean = ramsey_signal(gen, 2.0e6, tau);
  const CounterRng rng(77);
  std::vector<double> noisy = clean;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy[i] += 0.02 * gen.contrast * rng.normal(0, i);
  }
  const RamseyFit fit = fit_ramsey(tau, noisy);
  CHECK(fit.t2_star_err > 0.0);
  CHECK(fit.t2_star_err < 0.2 * gen.t2_star);
  CHECK(std::abs(fit.t2_star - gen.t2_star) < 5.0 * fit.t2_star_err + 0.05 * gen.t2_star);
}

TEST_CASE("degenerate and malformed inputs are rejected") {
  const auto tau = tau_grid(32, 6e-6);
  std::vector<double> flat(32, 0.25);
  CHECK_THROWS_WITH_AS(fit_ramsey(tau, flat), doctest::Contains("degenerate"),
                       std::runtime_error);
  std::vector<double> short_tau{0.0, 1e-7, 2e-7};
  std::vector<double> short_sig{0.1, 0.2, 0.1};
  CHECK_THROWS_AS(fit_ramsey(short_tau, short_sig), std::invalid_argument);
}
