#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "qdm/config.hpp"
#include "qdm/report.hpp"

namespace qdm::scenario {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::string format = "csv";  // csv | bin | svg; csv is always emitted
  bool want_bin() const { return format == "bin"; }
  bool want_svg() const { return format == "svg"; }
};

struct RunResult {
  std::vector<std::filesystem::path> artifacts;
  report::Report report;
};

/// Field sources described by the [field] section.
field::SourceSet build_sources(const config::ExperimentConfig& cfg);

/// Rendered, axis-projected field map of the configured sources.
FieldMap simulate_field(const config::ExperimentConfig& cfg);

/// Differentially combined per-set noise maps (zero signal), used for the
/// noise-floor scaling analysis. Per-set per-pixel noise follows either
/// the configured field-level noise or the camera noise chain.
std::vector<FieldMap> simulate_noise_set_maps(const config::ExperimentConfig& cfg,
                                              std::size_t n_sets);

/// Per-pixel per-frame field noise level (tesla) implied by the config:
/// the injected value when set, otherwise the camera chain (shot plus
/// quantization DU noise through the magnetometry slope).
double per_frame_field_noise(const config::ExperimentConfig& cfg);

/// Denoising comparison on the surrogate pattern: the rendered phantom
/// scaled to 300 pT peak-to-peak with 100 pT white noise, NLM against
/// Gaussian smoothing at matched output SNR.
struct DenoiseResult {
  FieldMap clean, noisy, nlm, gauss;
  PixelRoi signal_roi, noise_roi;
  double sigma_est = 0.0;   // noise estimated from the noise ROI
  double h_used = 0.0;      // NLM filtering strength, tesla
  double gauss_h_px = 0.0;  // matched Gaussian kernel scale
  double snr_in = 0.0, snr_nlm = 0.0, snr_gauss = 0.0;
  double mse_nlm = 0.0, mse_gauss = 0.0;            // vs the noisy input
  double mse_nlm_clean = 0.0, mse_gauss_clean = 0.0;  // vs the clean pattern
};
DenoiseResult run_denoise_chain(const config::ExperimentConfig& cfg);

/// End-to-end dynamic imaging: stimulus waveform -> amplitude-modulated
/// phantom field -> exposure accumulation -> gated differential repeats ->
/// binning -> per-frame trace at the pattern peak, compared against the
/// block-averaged (sinc-attenuated) scaled stimulus.
struct DynamicResult {
  std::vector<double> time_s;
  std::vector<double> trace_t;
  std::vector<double> reference_t;
  double correlation = 0.0;
  double per_frame_snr = 0.0;     // reference peak over combined frame noise
  double sigma_spatial_t = 0.0;   // spatial std of a signal-free combined frame
};
DynamicResult run_dynamic_chain(const config::ExperimentConfig& cfg);

/// Executes every requested output of the scenario, writing artifacts and
/// a manifest under opts.out_dir. Identical config and seed produce
/// byte-identical artifacts.
RunResult run_scenario(const config::ExperimentConfig& cfg, const RunOptions& opts);

/// Built-in quick checks of closed-form anchors (used by `check`): returns
/// the number of failed checks and prints one line per check.
int run_quick_checks(std::ostream& os);

}  // namespace qdm::scenario
