#pragma once

#include <cstddef>
#include <vector>

#include "qdm/field_map.hpp"
#include "qdm/frame_stack.hpp"

namespace qdm::pipeline {

/// Pixel-wise DU -> tesla conversion (division by the magnetometry slope).
FieldStack du_to_field(const FrameStack& stack, double slope_du_per_tesla);

enum class DifferentialMode { polarity, gating };

/// Paired frame sets acquired with the source modulated between them.
struct DifferentialPair {
  FrameStack set_a;  // polarity_plus or gated_on
  FrameStack set_b;  // polarity_minus or gated_off
  DifferentialMode mode = DifferentialMode::polarity;

  void validate() const;
};

/// Frame-wise combination: polarity (A - B)/2, gating A_on - A_off. Any
/// frame-independent common-mode map cancels exactly in both modes.
FieldStack differential_combine(const DifferentialPair& pair, double slope_du_per_tesla);

/// Map-level combination of already-converted field maps.
FieldMap differential_combine_maps(const FieldMap& a, const FieldMap& b,
                                   DifferentialMode mode);

/// Separable Gaussian blur, kernel standard deviation sigma_px pixels,
/// truncated at 4 sigma, edge replication.
FieldMap gaussian_blur(const FieldMap& map, double sigma_px);

/// High-pass background removal: input minus its Gaussian blur with kernel
/// standard deviation sigma metres (sigma/pitch pixels).
FieldMap highpass_gaussian(const FieldMap& map, double sigma_m = 18e-6);

struct SensitivityMap {
  FieldMap sigma_pxl;  // per-pixel std over frames, tesla
  FieldMap eta;        // sigma_pxl / sqrt(F_s), T/sqrt(Hz)
  double frame_rate;   // F_s used
  double median_eta;
  double mean_eta;
};

/// Per-pixel sensitivity eta = sigma_pxl / sqrt(F_s) from >= 2 frames.
SensitivityMap per_pixel_sensitivity(const FieldStack& stack);

struct NoiseFloorPoint {
  double t_acq_s;
  double sigma_spatial_t;  // tesla
  std::size_t sets_averaged;
};

struct NoiseFloorReport {
  std::vector<NoiseFloorPoint> points;
  std::size_t n_bin;
  double fit_slope;      // log-log slope of sigma_spatial vs T_acq
  double fit_slope_err;  // 1-sigma from the line-fit covariance
};

struct NoiseFloorOptions {
  std::size_t n_bin = 1;
  double highpass_sigma_m = 18e-6;  // <= 0 disables the background filter
  double t_acq_per_set_s = 1.0;
  std::size_t border_exclude_px = 0;
  /// Set counts at which to evaluate; empty = octave spacing 1,2,4,...
  std::vector<std::size_t> eval_at;
};

/// Spatial noise floor of cumulative time-averaged maps: each map is the
/// running mean of the first k per-set field maps, background-filtered,
/// then binned; sigma_spatial is the std across its pixels; the scaling
/// exponent comes from a least-squares line in log-log space.
NoiseFloorReport spatial_noise_floor(const std::vector<FieldMap>& per_set_maps,
                                     const NoiseFloorOptions& opts);

struct AllanCurve {
  std::vector<double> tau_s;
  std::vector<double> adev;
};

/// Overlapping Allan deviation of a uniformly sampled series at octave-
/// spaced averaging times. White noise of per-sample std sigma gives
/// adev(tau) = sigma / sqrt(F_s tau).
AllanCurve allan_deviation(const std::vector<double>& series, double sample_rate_hz);

/// (max - min over the signal ROI) / (std over the disjoint noise ROI).
double snr(const FieldMap& map, const PixelRoi& signal_roi, const PixelRoi& noise_roi);

enum class TraceExtraction { single_pixel, roi_peak };

struct ReconstructionOptions {
  TraceExtraction extraction = TraceExtraction::single_pixel;
  std::size_t pixel_row = 0, pixel_col = 0;  // single_pixel mode
  PixelRoi roi;                              // roi_peak mode: max over the ROI
};

struct ReconstructedTrace {
  std::vector<double> time_s;
  std::vector<double> value_t;       // tesla per frame
  std::vector<double> reference_t;   // scaled stimulus, empty if no scale given
};

/// Per-frame signal value from a field stack; when `scale_t_per_v` is
/// given, `stimulus_v` (one sample per frame) is scaled into a reference
/// trace for overlay.
ReconstructedTrace reconstruct_waveform(const FieldStack& stack,
                                        const ReconstructionOptions& opts,
                                        const std::vector<double>& stimulus_v = {},
                                        double scale_t_per_v = 0.0);

/// Pearson correlation coefficient.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace qdm::pipeline
