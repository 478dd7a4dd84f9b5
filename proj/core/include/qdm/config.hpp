#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdm/bath.hpp"
#include "qdm/biot_savart.hpp"
#include "qdm/camera.hpp"
#include "qdm/pipeline.hpp"
#include "qdm/spin_model.hpp"

namespace qdm::config {

/// Schema violation or malformed config text.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sectioned key-value text: `[section]` headers, `key = value` lines,
/// '#' comments. Keys are validated against the experiment schema on load.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_number(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string origin_;
};

enum class NoiseChoice { off, gaussian, poisson };

struct FieldSection {
  field::SensingGeometry geometry;
  std::string phantom;     // "serpentine", "none" or a geometry CSV path
  double current_a = 436e-9;
  bool current_set = false;  // config overrides a geometry file's current
  double trace_width_m = 4e-6;
  double trace_thickness_m = 10e-9;
  int filaments = 5;
  bool dipole_enabled = false;
  double dipole_moment = 1e-16;   // A m^2, z-oriented
  double dipole_depth = 10e-6;    // m below the layer start
  Vec3 uniform_t;
};

struct PipelineSection {
  pipeline::DifferentialMode mode = pipeline::DifferentialMode::polarity;
  bool differential = true;
  std::size_t n_bin = 1;
  std::size_t framesets = 16;
  std::size_t frames_per_set = 500;
  double highpass_sigma_m = 18e-6;
  /// When positive, per-frame per-pixel field noise injected directly
  /// (tesla) instead of the camera noise chain.
  double per_frame_noise_t = 0.0;
  std::size_t border_exclude_px = 0;
  PixelRoi signal_roi{0, 0, 0, 0};
  PixelRoi noise_roi{0, 0, 0, 0};
  bool rois_set = false;
};

struct DenoiseSection {
  int search_px = 21;
  int template_px = 7;
  double h_scale = 0.5;   // h = h_scale * sigma estimated from the noise ROI
  double h_t = 0.0;       // absolute override, tesla
};

struct WaveformSection {
  std::string source = "synthetic";  // "synthetic" or a CSV path
  double duration_s = 1.0;
  double beat_hz = 1.2;
  double peak_v = 0.025;
  double scale_nt_per_v = 274.26;
  std::size_t repeats = 400;
};

struct BathSection {
  bath::P1Params p1;
  double b_mag_t = 4.278e-3;
  double rabi_hz = 2e6;
  double line_width_hz = 2e6;
  double line_contrast = 1.0;
  double t2_nv_s = 2.5e-6;
  double t2_undriven_s = 1.2e-6;
  double t2_driven_target_s = 2.2e-6;
};

/// Everything a scenario run needs, schema-validated, SI units throughout.
struct ExperimentConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;
  spin::NVParams nv;
  camera::CameraConfig cam;
  NoiseChoice noise = NoiseChoice::gaussian;
  FieldSection field;
  PipelineSection pipe;
  DenoiseSection den;
  WaveformSection wave;
  BathSection bath;

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_config(const ConfigFile& file);
};

}  // namespace qdm::config
