#pragma once

#include <cstdint>
#include <vector>

#include "qdm/field_map.hpp"
#include "qdm/frame_stack.hpp"
#include "qdm/rng.hpp"
#include "qdm/spin_model.hpp"

namespace qdm::camera {

/// Lock-in camera timing, accumulation, conversion and noise parameters.
struct CameraConfig {
  double internal_rate = 122e3;      // Hz, internal exposure rate (<= 1 MHz)
  int n_cycles = 72;                 // internal exposures accumulated per frame
  double cf = 1.0 / 446.0;           // DU per photoelectron
  double du_range = 1023.0;          // frames hold accumulated differences: +-du_range
  int buffer_frames = 500;
  double t_transfer = 5.0;           // s, camera buffer -> host
  double t_soft_static = 2.0;        // s, software overhead per frame set (static)
  double t_soft_dynamic = 17.0;      // s, software overhead per frame set (dynamic)
  double photons_per_exposure = 4e4; // N, per pixel per internal exposure
  double readout_window = 2.15e-6;   // s

  double external_rate() const;  // Hz, internal_rate / n_cycles, capped at 3.8 kHz
  void validate() const;
};

/// sqrt(0.81 + 0.16 N_c): electronic plus digitization noise per external
/// frame, in DU, after N_c difference-accumulation cycles.
double quantization_noise_du(int n_cycles);

/// CF = A_noise / (2 A_signal).
double calibrate_cf(double noise_slope_du2_per_s, double signal_slope_du_per_s);

/// Monte-Carlo companion for calibrate_cf: simulates differential exposure
/// pairs of a Poisson photon stream at `rate_photons_per_s`, regresses the
/// DU variance against readout duration and the DU signal against the
/// duration imbalance, and returns the recovered CF.
struct CfCalibration {
  double noise_slope;   // DU^2 per s
  double signal_slope;  // DU per s
  double cf;
};
CfCalibration simulate_cf_calibration(double cf_true, double rate_photons_per_s,
                                      std::size_t draws_per_point,
                                      const CounterRng& rng);

/// Photon shot-noise limited Ramsey sensitivity (T/sqrt(Hz)):
/// eta = hbar/(dm g mu_B) * 1/(C e^{-(tau/T2*)^p} sqrt(N)) * sqrt(t_IR+tau)/tau.
double shot_sensitivity(const spin::NVParams& p, double n_photons, int delta_m);

/// Small-signal slope of the external-frame output in DU per tesla, from
/// the DQ 4-Ramsey fringe at its operating point: per internal exposure the
/// photon count is modulated by +-(C/2) e^{-(tau/T2*)^p} of the fringe, and
/// n_cycles signed exposures accumulate into the frame through CF.
double frame_du_slope(const spin::NVParams& p, const CameraConfig& cfg);

enum class NoiseMode { off, gaussian, poisson_shot };

struct NoiseSettings {
  NoiseMode mode = NoiseMode::gaussian;
  CounterRng rng;
};

/// Axis-projected field samples per internal exposure, separable as
/// pattern(pixel) * modulation(exposure index).
struct ExposureSeries {
  FieldMap pattern;
  std::vector<double> modulation;
};

struct ExposeResult {
  FrameStack stack;
  std::uint64_t clamped = 0;  // DU values clipped at +-du_range
  std::uint64_t total = 0;
};

/// Accumulates internal exposures into external frames:
/// DU = slope * (block mean of the field over the frame's n_cycles
/// exposures) + shot noise (std cf sqrt(2 N n_cycles)) + quantization noise
/// (std from quantization_noise_du), clamped to +-du_range.
/// The series length must be a multiple of n_cycles.
ExposeResult expose_frames(const ExposureSeries& series, double slope_du_per_tesla,
                           const CameraConfig& cfg, const NoiseSettings& noise);

/// |sinc(pi f / F_s)|: attenuation of a tone at f by the accumulation of
/// internal exposures into external frames.
double spectral_attenuation(double f_hz, const CameraConfig& cfg);

enum class AcquisitionMode { static_imaging, dynamic_imaging };

struct Timing {
  double t_acq;   // s, pure acquisition
  double t_wall;  // s, acquisition + transfer + software overhead
};

/// T_acq = n_framesets * buffer_frames / F_s;
/// T_wall = T_acq + n_framesets * (t_transfer + t_soft_mode).
Timing timing_model(int n_framesets, AcquisitionMode mode, const CameraConfig& cfg);

}  // namespace qdm::camera
