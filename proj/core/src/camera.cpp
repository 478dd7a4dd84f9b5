#include "qdm/camera.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "qdm/constants.hpp"
#include "qdm/parallel.hpp"

namespace qdm::camera {

using constants::two_pi;

double CameraConfig::external_rate() const {
  return std::min(internal_rate / static_cast<double>(n_cycles), 3.8e3);
}

void CameraConfig::validate() const {
  if (internal_rate <= 0.0 || internal_rate > 1e6) {
    throw std::invalid_argument("internal exposure rate must be in (0, 1 MHz]");
  }
  if (n_cycles < 1) throw std::invalid_argument("n_cycles must be >= 1");
  if (cf <= 0.0) throw std::invalid_argument("conversion factor must be positive");
  if (buffer_frames < 1) throw std::invalid_argument("buffer_frames must be >= 1");
  if (photons_per_exposure <= 0.0) {
    throw std::invalid_argument("photons_per_exposure must be positive");
  }
}

double quantization_noise_du(int n_cycles) {
  if (n_cycles < 0) throw std::invalid_argument("n_cycles must be >= 0");
  return std::sqrt(0.81 + 0.16 * static_cast<double>(n_cycles));
}

double calibrate_cf(double noise_slope_du2_per_s, double signal_slope_du_per_s) {
  if (noise_slope_du2_per_s <= 0.0 || signal_slope_du_per_s <= 0.0) {
    throw std::invalid_argument("calibrate_cf: slopes must be positive");
  }
  return noise_slope_du2_per_s / (2.0 * signal_slope_du_per_s);
}

namespace {

/// Least-squares slope of y vs x through the origin-free line fit.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

CfCalibration simulate_cf_calibration(double cf_true, double rate_photons_per_s,
                                      std::size_t draws_per_point,
                                      const CounterRng& rng) {
  if (cf_true <= 0.0 || rate_photons_per_s <= 0.0 || draws_per_point < 2) {
    throw std::invalid_argument("simulate_cf_calibration: bad arguments");
  }
  // Noise sweep: equal-duration exposure pairs, DU = CF (N1 - N2).
  const std::vector<double> durations{0.5e-6, 1.0e-6, 1.5e-6, 2.0e-6, 2.5e-6, 3.0e-6};
  std::vector<double> var_du(durations.size());
  for (std::size_t k = 0; k < durations.size(); ++k) {
    const double mean_n = rate_photons_per_s * durations[k];
    double sum = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < draws_per_point; ++i) {
      const auto n1 = static_cast<double>(rng.poisson(mean_n, 2 * k, i));
      const auto n2 = static_cast<double>(rng.poisson(mean_n, 2 * k + 1, i));
      const double du = cf_true * (n1 - n2);
      sum += du;
      ss += du * du;
    }
    const double n = static_cast<double>(draws_per_point);
    const double mean = sum / n;
    var_du[k] = ss / n - mean * mean;
  }
  // Signal sweep: duration imbalance dt, DU = CF (N(t + dt) - N(t)).
  const double t_base = 2.0e-6;
  const std::vector<double> imbalances{0.1e-6, 0.2e-6, 0.3e-6, 0.4e-6, 0.5e-6};
  std::vector<double> mean_du(imbalances.size());
  for (std::size_t k = 0; k < imbalances.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < draws_per_point; ++i) {
      const auto n1 =
          static_cast<double>(rng.poisson(rate_photons_per_s * (t_base + imbalances[k]),
                                          100 + 2 * k, i));
      const auto n2 =
          static_cast<double>(rng.poisson(rate_photons_per_s * t_base, 101 + 2 * k, i));
      sum += cf_true * (n1 - n2);
    }
    mean_du[k] = sum / static_cast<double>(draws_per_point);
  }
  CfCalibration out;
  out.noise_slope = fit_slope(durations, var_du);
  out.signal_slope = fit_slope(imbalances, mean_du);
  out.cf = calibrate_cf(out.noise_slope, out.signal_slope);
  return out;
}

double shot_sensitivity(const spin::NVParams& p, double n_photons, int delta_m) {
  p.validate();
  if (n_photons <= 0.0) throw std::invalid_argument("shot_sensitivity: need photons");
  if (delta_m != 1 && delta_m != 2) {
    throw std::invalid_argument("shot_sensitivity: delta_m must be 1 or 2");
  }
  if (p.tau <= 0.0) {
    throw std::domain_error("shot_sensitivity: unbounded at tau = 0");
  }
  const double prefactor =
      constants::hbar / (static_cast<double>(delta_m) * constants::g_nv * constants::mu_bohr);
  const double signal = p.contrast * spin::ramsey_envelope(p, p.tau) * std::sqrt(n_photons);
  return prefactor / signal * std::sqrt(p.t_init_readout + p.tau) / p.tau;
}

double frame_du_slope(const spin::NVParams& p, const CameraConfig& cfg) {
  cfg.validate();
  // dS_norm/dB of the composed 4-measurement fringe at its quadrature
  // operating point, times photons per exposure, times the number of
  // 4-measurement groups per frame, through the conversion factor.
  const double fringe_slope = 2.0 * p.contrast * spin::ramsey_envelope(p, p.tau) *
                              2.0 * p.gamma * p.tau *
                              std::cos(constants::pi * p.a_hf * p.tau);
  return cfg.cf * cfg.photons_per_exposure * (static_cast<double>(cfg.n_cycles) / 4.0) *
         fringe_slope;
}

ExposeResult expose_frames(const ExposureSeries& series, double slope_du_per_tesla,
                           const CameraConfig& cfg, const NoiseSettings& noise) {
  cfg.validate();
  if (slope_du_per_tesla == 0.0) throw std::invalid_argument("expose_frames: zero slope");
  const std::size_t n_cycles = static_cast<std::size_t>(cfg.n_cycles);
  if (series.modulation.empty() || series.modulation.size() % n_cycles != 0) {
    throw std::invalid_argument(
        "expose_frames: exposure count must be a positive multiple of n_cycles");
  }
  const std::size_t n_frames = series.modulation.size() / n_cycles;
  const std::size_t pixels = series.pattern.size();

  // Block means of the modulation: the per-frame low-pass.
  std::vector<double> block_mean(n_frames, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_cycles; ++j) acc += series.modulation[f * n_cycles + j];
    block_mean[f] = acc / static_cast<double>(n_cycles);
  }

  const double shot_std =
      cfg.cf * std::sqrt(2.0 * cfg.photons_per_exposure * static_cast<double>(cfg.n_cycles));
  const double quant_std = quantization_noise_du(cfg.n_cycles);

  ExposeResult result;
  result.stack = FrameStack(series.pattern.width, series.pattern.height,
                            cfg.external_rate(), n_frames);
  result.total = static_cast<std::uint64_t>(n_frames) * pixels;
  std::atomic<std::uint64_t> clamped{0};

  parallel_for(n_frames, [&](std::size_t f) {
    auto& frame = result.stack.frames[f];
    std::uint64_t local_clamped = 0;
    for (std::size_t px = 0; px < pixels; ++px) {
      double du = slope_du_per_tesla * series.pattern.values[px] * block_mean[f];
      if (noise.mode != NoiseMode::off) {
        double shot;
        if (noise.mode == NoiseMode::poisson_shot) {
          // Accumulated signed Poisson differences, centred.
          const double n_mean = cfg.photons_per_exposure;
          double acc = 0.0;
          for (std::size_t j = 0; j < 2 * n_cycles; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            acc += sign * static_cast<double>(noise.rng.poisson(
                              n_mean, 2 * px, f * 2 * n_cycles + j));
          }
          shot = cfg.cf * acc;
        } else {
          shot = shot_std * noise.rng.normal(2 * px, f);
        }
        du += shot + quant_std * noise.rng.normal(2 * px + 1, f);
      }
      if (du > cfg.du_range) {
        du = cfg.du_range;
        ++local_clamped;
      } else if (du < -cfg.du_range) {
        du = -cfg.du_range;
        ++local_clamped;
      }
      frame[px] = du;
    }
    clamped += local_clamped;
  });
  result.clamped = clamped.load();
  return result;
}

double spectral_attenuation(double f_hz, const CameraConfig& cfg) {
  if (f_hz < 0.0) throw std::invalid_argument("spectral_attenuation: f must be >= 0");
  const double x = constants::pi * f_hz / cfg.external_rate();
  if (x == 0.0) return 1.0;
  return std::abs(std::sin(x) / x);
}

Timing timing_model(int n_framesets, AcquisitionMode mode, const CameraConfig& cfg) {
  if (n_framesets < 1) throw std::invalid_argument("timing_model: n_framesets must be >= 1");
  cfg.validate();
  const double n = static_cast<double>(n_framesets);
  const double t_soft =
      mode == AcquisitionMode::static_imaging ? cfg.t_soft_static : cfg.t_soft_dynamic;
  Timing t;
  t.t_acq = n * static_cast<double>(cfg.buffer_frames) / cfg.external_rate();
  t.t_wall = t.t_acq + n * (cfg.t_transfer + t_soft);
  return t;
}

}  // namespace qdm::camera
