#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qdm/camera.hpp"
#include "qdm/constants.hpp"

using namespace qdm;
using namespace qdm::camera;
using constants::two_pi;

namespace {

/// Single-bin DFT amplitude of a real series: 2 |X_k| / M.
double tone_amplitude(const std::vector<double>& series, std::size_t k) {
  const std::size_t m = series.size();
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ph = two_pi * static_cast<double>(k * i) / static_cast<double>(m);
    re += series[i] * std::cos(ph);
    im -= series[i] * std::sin(ph);
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(m);
}

FieldMap unit_pattern() {
  FieldMap m(1, 1, 1.9e-6);
  m.values = {1.0};
  return m;
}

}  // namespace

TEST_CASE("quantization noise formula") {
  CHECK(quantization_noise_du(0) == doctest::Approx(0.9));
  CHECK(quantization_noise_du(1) == doctest::Approx(std::sqrt(0.97)));
  CHECK(quantization_noise_du(1) == doctest::Approx(0.985).epsilon(1e-3));
  CHECK(quantization_noise_du(72) == std::sqrt(0.81 + 0.16 * 72.0));
  CHECK(quantization_noise_du(72) == doctest::Approx(3.512).epsilon(3e-4));
  CHECK_THROWS_AS(quantization_noise_du(-1), std::invalid_argument);
}

TEST_CASE("calibrate_cf arithmetic") {
  CHECK(calibrate_cf(2.0, 446.0) == doctest::Approx(1.0 / 446.0));
  CHECK_THROWS_AS(calibrate_cf(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_cf(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("cf recovered from a simulated Poisson photon stream within 2%") {
  const double cf_true = 1.0 / 446.0;
  const CounterRng rng(2024);
  const auto cal = simulate_cf_calibration(cf_true, 2e9, 120000, rng);
  CHECK(cal.cf == doctest::Approx(cf_true).epsilon(0.02));
  // CF is flux-independent: doubling the photon rate moves the estimate
  // only within statistical error.
  const CounterRng rng2(2025);
  const auto cal2 = simulate_cf_calibration(cf_true, 4e9, 120000, rng2);
  CHECK(cal2.cf == doctest::Approx(cal.cf).epsilon(0.03));
}

TEST_CASE("shot sensitivity anchor and scalings") {
  spin::NVParams p;
  p.contrast = 0.03;
  p.t2_star = 2.3e-6;
  p.decay_p = 1.0;
  p.t_init_readout = 7.04e-6;
  p.tau = 2.29e-6;
  const double eta = shot_sensitivity(p, 4e4, 2);
  CHECK(eta == doctest::Approx(1.7e-9).epsilon(0.03));
  CHECK(shot_sensitivity(p, 16e4, 2) == doctest::Approx(eta / 2.0).epsilon(1e-12));
  CHECK(shot_sensitivity(p, 4e4, 1) == doctest::Approx(2.0 * eta).epsilon(1e-12));
  p.tau = 0.0;
  CHECK_THROWS_AS(shot_sensitivity(p, 4e4, 2), std::domain_error);
}

TEST_CASE("external rate is the internal rate over n_cycles, capped") {
  CameraConfig cfg;
  CHECK(cfg.external_rate() == doctest::Approx(122e3 / 72.0));
  cfg.n_cycles = 2;
  CHECK(cfg.external_rate() == doctest::Approx(3.8e3));  // cap
}

TEST_CASE("expose_frames: noiseless constant field gives identical frames") {
  CameraConfig cfg;
  cfg.n_cycles = 8;
  NoiseSettings off;
  off.mode = NoiseMode::off;
  ExposureSeries series{unit_pattern(), std::vector<double>(8 * 5, 2.5e-9)};
  const auto r = expose_frames(series, 1e9, cfg, off);
  REQUIRE(r.stack.frame_count() == 5);
  for (const auto& f : r.stack.frames) CHECK(f[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r.clamped == 0);
}

TEST_CASE("expose_frames is linear in field and slope when noiseless") {
  CameraConfig cfg;
  cfg.n_cycles = 4;
  NoiseSettings off;
  off.mode = NoiseMode::off;
  std::vector<double> mod(4 * 6);
  for (std::size_t i = 0; i < mod.size(); ++i) {
    mod[i] = 1e-9 * std::sin(0.37 * static_cast<double>(i));
  }
  ExposureSeries series{unit_pattern(), mod};
  const auto base = expose_frames(series, 2e9, cfg, off);
  ExposureSeries scaled = series;
  for (double& v : scaled.modulation) v *= 3.0;
  const auto tripled = expose_frames(scaled, 2e9, cfg, off);
  const auto slope_doubled = expose_frames(series, 4e9, cfg, off);
  for (std::size_t f = 0; f < 6; ++f) {
    CHECK(tripled.stack.frames[f][0] ==
          doctest::Approx(3.0 * base.stack.frames[f][0]).epsilon(1e-6));
    CHECK(slope_doubled.stack.frames[f][0] ==
          doctest::Approx(2.0 * base.stack.frames[f][0]).epsilon(1e-6));
  }
}

TEST_CASE("expose_frames rejects bad input") {
  CameraConfig cfg;
  cfg.n_cycles = 8;
  NoiseSettings off;
  off.mode = NoiseMode::off;
  ExposureSeries series{unit_pattern(), std::vector<double>(12, 1.0)};  // not a multiple
  CHECK_THROWS_AS(expose_frames(series, 1e9, cfg, off), std::invalid_argument);
  series.modulation.resize(16);
  CHECK_THROWS_AS(expose_frames(series, 0.0, cfg, off), std::invalid_argument);
}

TEST_CASE("expose_frames clamps and counts out-of-range DU values") {
  CameraConfig cfg;
  cfg.n_cycles = 2;
  NoiseSettings off;
  off.mode = NoiseMode::off;
  ExposureSeries series{unit_pattern(), {1.0, 1.0, -1.0, -1.0}};
  const auto r = expose_frames(series, 5000.0, cfg, off);
  CHECK(r.stack.frames[0][0] == doctest::Approx(1023.0));
  CHECK(r.stack.frames[1][0] == doctest::Approx(-1023.0));
  CHECK(r.clamped == 2);
  CHECK(r.total == 2);
}

TEST_CASE("sinusoid amplitude through the exposure chain matches sinc") {
  // 305 frames at F_s = 122 kHz / 72 make 200, 500 and 750 Hz land on
  // exact DFT bins (f M / F_s = 36, 90, 135).
  CameraConfig cfg;  // 122 kHz, 72 cycles
  NoiseSettings off;
  off.mode = NoiseMode::off;
  const std::size_t frames = 305;
  const std::size_t n = frames * static_cast<std::size_t>(cfg.n_cycles);
  const double b0 = 1e-9, slope = 1e9;
  const struct {
    double f_hz;
    std::size_t bin;
  } tones[] = {{100.0, 18}, {200.0, 36}, {500.0, 90}, {750.0, 135}};
  for (const auto& tone : tones) {
    std::vector<double> mod(n);
    for (std::size_t i = 0; i < n; ++i) {
      mod[i] = b0 * std::sin(two_pi * tone.f_hz * static_cast<double>(i) / cfg.internal_rate);
    }
    ExposureSeries series{unit_pattern(), mod};
    const auto r = expose_frames(series, slope, cfg, off);
    std::vector<double> trace(frames);
    for (std::size_t f = 0; f < frames; ++f) trace[f] = r.stack.frames[f][0];
    const double measured = tone_amplitude(trace, tone.bin) / (slope * b0);
    CHECK(measured == doctest::Approx(spectral_attenuation(tone.f_hz, cfg)).epsilon(0.02));
  }
}

TEST_CASE("spectral attenuation anchors") {
  CameraConfig cfg;
  CHECK(spectral_attenuation(0.0, cfg) == 1.0);
  CHECK(spectral_attenuation(750.0, cfg) == doctest::Approx(0.7075).epsilon(1e-3));
  CHECK(spectral_attenuation(200.0, cfg) == doctest::Approx(0.9772).epsilon(1e-3));
  CHECK(spectral_attenuation(500.0, cfg) == doctest::Approx(0.8628).epsilon(1e-3));
}

TEST_CASE("zero field with noise on: frame std is the quadrature sum") {
  CameraConfig cfg;
  cfg.n_cycles = 72;
  NoiseSettings noise;
  noise.mode = NoiseMode::gaussian;
  noise.rng = CounterRng(5);
  const std::size_t frames = 20000;
  ExposureSeries series{unit_pattern(),
                        std::vector<double>(frames * static_cast<std::size_t>(cfg.n_cycles), 0.0)};
  const auto r = expose_frames(series, 1e7, cfg, noise);
  double sum = 0.0, ss = 0.0;
  for (const auto& f : r.stack.frames) {
    sum += f[0];
    ss += static_cast<double>(f[0]) * f[0];
  }
  const double n = static_cast<double>(frames);
  const double var = ss / n - (sum / n) * (sum / n);
  const double shot = cfg.cf * std::sqrt(2.0 * cfg.photons_per_exposure * 72.0);
  const double expected = std::hypot(shot, quantization_noise_du(72));
  CHECK(std::sqrt(var) == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("poisson shot mode matches the gaussian noise budget") {
  CameraConfig cfg;
  cfg.n_cycles = 8;
  cfg.photons_per_exposure = 400.0;
  NoiseSettings noise;
  noise.mode = NoiseMode::poisson_shot;
  noise.rng = CounterRng(12);
  const std::size_t frames = 4000;
  ExposureSeries series{unit_pattern(), std::vector<double>(frames * 8, 0.0)};
  const auto r = expose_frames(series, 1e7, cfg, noise);
  double sum = 0.0, ss = 0.0;
  for (const auto& f : r.stack.frames) {
    sum += f[0];
    ss += f[0] * f[0];
  }
  const double n = static_cast<double>(frames);
  const double var = ss / n - (sum / n) * (sum / n);
  const double shot = cfg.cf * std::sqrt(2.0 * 400.0 * 8.0);
  const double expected = std::hypot(shot, quantization_noise_du(8));
  CHECK(std::abs(sum / n) < 0.05 * expected);  // signed accumulation is centred
  CHECK(std::sqrt(var) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("quantization noise in DU is slope-independent; field-equivalent scales as 1/slope") {
  CameraConfig cfg;
  cfg.n_cycles = 16;
  cfg.photons_per_exposure = 1e-12;  // shot noise negligible
  NoiseSettings noise;
  noise.rng = CounterRng(6);
  const std::size_t frames = 5000;
  ExposureSeries series{unit_pattern(),
                        std::vector<double>(frames * 16, 0.0)};
  const auto measure_du_std = [&](double slope) {
    const auto r = expose_frames(series, slope, cfg, noise);
    double sum = 0.0, ss = 0.0;
    for (const auto& f : r.stack.frames) {
      sum += f[0];
      ss += static_cast<double>(f[0]) * f[0];
    }
    const double n = static_cast<double>(frames);
    return std::sqrt(ss / n - (sum / n) * (sum / n));
  };
  const double du_lo = measure_du_std(1e6);
  const double du_hi = measure_du_std(2e6);
  CHECK(du_lo == doctest::Approx(du_hi).epsilon(1e-9));  // same draws, same DU noise
  CHECK(du_lo / 1e6 == doctest::Approx(2.0 * (du_hi / 2e6)).epsilon(1e-9));
}

TEST_CASE("frame slope feeds the quantization-limited sensitivity estimate") {
  spin::NVParams p;
  p.contrast = 0.03;
  p.t2_star = 2.3e-6;
  p.tau = 2.29e-6;
  CameraConfig cfg;
  const double slope = frame_du_slope(p, cfg);
  CHECK(std::abs(slope) == doctest::Approx(2.88e7).epsilon(0.01));
  const double eta_q = quantization_noise_du(cfg.n_cycles) / std::abs(slope) /
                       std::sqrt(cfg.external_rate());
  CHECK(eta_q == doctest::Approx(2.96e-9).epsilon(0.01));
}

TEST_CASE("timing model anchors") {
  CameraConfig cfg;
  cfg.internal_rate = 38016.0;  // 528 Hz external at 72 cycles
  const auto one = timing_model(1, AcquisitionMode::static_imaging, cfg);
  CHECK(one.t_acq == doctest::Approx(500.0 / 528.0).epsilon(1e-6));
  CHECK(one.t_wall == doctest::Approx(500.0 / 528.0 + 7.0).epsilon(1e-6));
  CHECK(one.t_wall == doctest::Approx(7.95).epsilon(1e-3));

  const auto big = timing_model(3802, AcquisitionMode::static_imaging, cfg);
  CHECK(big.t_acq == doctest::Approx(3600.0).epsilon(1e-3));
  // With the default 5 s + 2 s per-set overheads, an hour of acquisition
  // at 528 Hz carries about 8.4 h of wall clock; the overheads stay
  // configurable because deployments report effective values near 5-6 s.
  CHECK(big.t_wall == doctest::Approx(big.t_acq + 3802.0 * 7.0).epsilon(1e-9));
  CHECK(big.t_wall / 3600.0 == doctest::Approx(8.39).epsilon(0.01));
  CHECK(std::abs(big.t_wall - 7.0 * 3600.0) / (7.0 * 3600.0) < 0.25);

  const auto dyn = timing_model(10, AcquisitionMode::dynamic_imaging, cfg);
  CHECK(dyn.t_wall == doctest::Approx(dyn.t_acq + 10.0 * 22.0).epsilon(1e-9));
  CHECK_THROWS_AS(timing_model(0, AcquisitionMode::static_imaging, cfg),
                  std::invalid_argument);
}
