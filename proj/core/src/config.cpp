#include "qdm/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qdm::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// section -> allowed keys; validated at parse time so typos fail loudly.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"name", "seed", "outputs", "format"}},
      {"spin",
       {"zfs_hz", "mz_hz", "a_hf_hz", "t2_star_s", "decay_p", "contrast",
        "t_init_readout_s", "tau_s"}},
      {"camera",
       {"internal_rate_hz", "n_cycles", "cf", "photons_per_exposure",
        "readout_window_s", "buffer_frames", "t_transfer_s", "t_soft_static_s",
        "t_soft_dynamic_s", "du_range", "noise"}},
      {"field",
       {"width_px", "height_px", "pixel_pitch_m", "standoff_m", "layer_thickness_m",
        "depth_samples", "axis", "phantom", "current_a", "trace_width_m",
        "trace_thickness_m", "filaments", "dipole_moment_am2", "dipole_depth_m",
        "uniform_bx_t", "uniform_by_t", "uniform_bz_t"}},
      {"pipeline",
       {"mode", "n_bin", "framesets", "frames_per_set", "highpass_sigma_m",
        "per_frame_noise_t", "border_exclude_px", "signal_roi", "noise_roi"}},
      {"denoise", {"search_px", "template_px", "h_scale", "h_t"}},
      {"waveform",
       {"source", "duration_s", "beat_hz", "peak_v", "scale_nt_per_v", "repeats"}},
      {"bath",
       {"g_perp", "g_par", "a_perp_hz", "a_par_hz", "b_mag_t", "rabi_hz",
        "line_width_hz", "line_contrast", "t2_nv_s", "t2_undriven_s",
        "t2_driven_target_s"}},
  };
  return s;
}

void validate_key(const std::string& section, const std::string& key,
                  const std::string& context) {
  const auto& sch = schema();
  const auto sit = sch.find(section);
  if (sit == sch.end()) {
    throw ConfigError("unknown section [" + section + "] at " + context);
  }
  if (sit->second.find(key) == sit->second.end()) {
    throw ConfigError("unknown key '" + key + "' in section [" + section + "] at " + context);
  }
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str(), path.string());
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string ctx = origin + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header at " + ctx);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name at " + ctx);
      if (schema().find(section) == schema().end()) {
        throw ConfigError("unknown section [" + section + "] at " + ctx);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value at " + ctx);
    if (section.empty()) throw ConfigError("key outside any section at " + ctx);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at " + ctx);
    validate_key(section, key, ctx);
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  return sit != sections_.end() && sit->second.find(key) != sit->second.end();
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return fallback;
  const auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second;
}

double ConfigFile::get_number(const std::string& section, const std::string& key,
                              double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key, "");
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key " + section + "." + key + " is not a number: '" + raw + "'");
  }
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_number(section, key, 0.0);
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("key " + section + "." + key + " must be an integer");
  }
  return i;
}

std::vector<std::string> ConfigFile::get_list(const std::string& section,
                                              const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream is(get_string(section, key, ""));
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  validate_key(section, key, "<override>");
  sections_[section][key] = value;
}

namespace {

PixelRoi parse_roi(const std::string& raw, const std::string& what) {
  std::istringstream is(raw);
  std::string cell;
  std::vector<std::size_t> v;
  while (std::getline(is, cell, ':')) {
    try {
      v.push_back(static_cast<std::size_t>(std::stoul(trim(cell))));
    } catch (const std::exception&) {
      throw ConfigError(what + ": expected row0:col0:row1:col1, got '" + raw + "'");
    }
  }
  if (v.size() != 4) {
    throw ConfigError(what + ": expected row0:col0:row1:col1, got '" + raw + "'");
  }
  return PixelRoi{v[0], v[1], v[2], v[3]};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  return from_config(ConfigFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& f) {
  ExperimentConfig c;
  c.name = f.get_string("scenario", "name", c.name);
  const double seed = f.get_number("scenario", "seed", 1.0);
  if (seed < 0.0) throw ConfigError("scenario.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.outputs = f.get_list("scenario", "outputs");

  c.nv.zfs = constants::two_pi * f.get_number("spin", "zfs_hz", 2.87e9);
  c.nv.mz = constants::two_pi * f.get_number("spin", "mz_hz", 0.0);
  c.nv.a_hf = f.get_number("spin", "a_hf_hz", c.nv.a_hf);
  c.nv.t2_star = f.get_number("spin", "t2_star_s", c.nv.t2_star);
  c.nv.decay_p = f.get_number("spin", "decay_p", c.nv.decay_p);
  c.nv.contrast = f.get_number("spin", "contrast", c.nv.contrast);
  c.nv.t_init_readout = f.get_number("spin", "t_init_readout_s", c.nv.t_init_readout);
  c.nv.tau = f.get_number("spin", "tau_s", c.nv.tau);
  try {
    c.nv.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("spin section: ") + e.what());
  }

  c.cam.internal_rate = f.get_number("camera", "internal_rate_hz", c.cam.internal_rate);
  c.cam.n_cycles = static_cast<int>(f.get_int("camera", "n_cycles", c.cam.n_cycles));
  c.cam.cf = f.get_number("camera", "cf", c.cam.cf);
  c.cam.photons_per_exposure =
      f.get_number("camera", "photons_per_exposure", c.cam.photons_per_exposure);
  c.cam.readout_window = f.get_number("camera", "readout_window_s", c.cam.readout_window);
  c.cam.buffer_frames =
      static_cast<int>(f.get_int("camera", "buffer_frames", c.cam.buffer_frames));
  c.cam.t_transfer = f.get_number("camera", "t_transfer_s", c.cam.t_transfer);
  c.cam.t_soft_static = f.get_number("camera", "t_soft_static_s", c.cam.t_soft_static);
  c.cam.t_soft_dynamic = f.get_number("camera", "t_soft_dynamic_s", c.cam.t_soft_dynamic);
  c.cam.du_range = f.get_number("camera", "du_range", c.cam.du_range);
  const std::string noise = f.get_string("camera", "noise", "gaussian");
  if (noise == "off") c.noise = NoiseChoice::off;
  else if (noise == "gaussian") c.noise = NoiseChoice::gaussian;
  else if (noise == "poisson") c.noise = NoiseChoice::poisson;
  else throw ConfigError("camera.noise must be off, gaussian or poisson");
  try {
    c.cam.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("camera section: ") + e.what());
  }

  auto& g = c.field.geometry;
  g.width = static_cast<std::size_t>(f.get_int("field", "width_px", 142));
  g.height = static_cast<std::size_t>(f.get_int("field", "height_px", 142));
  g.pixel_pitch = f.get_number("field", "pixel_pitch_m", g.pixel_pitch);
  g.standoff = f.get_number("field", "standoff_m", g.standoff);
  g.layer_thickness = f.get_number("field", "layer_thickness_m", g.layer_thickness);
  g.depth_samples = static_cast<int>(f.get_int("field", "depth_samples", g.depth_samples));
  try {
    g.axis = field::nv_axis_from_string(f.get_string("field", "axis", "111"));
    g.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field section: ") + e.what());
  }
  c.field.phantom = f.get_string("field", "phantom", "serpentine");
  c.field.current_set = f.has("field", "current_a");
  c.field.current_a = f.get_number("field", "current_a", c.field.current_a);
  c.field.trace_width_m = f.get_number("field", "trace_width_m", c.field.trace_width_m);
  c.field.trace_thickness_m =
      f.get_number("field", "trace_thickness_m", c.field.trace_thickness_m);
  c.field.filaments = static_cast<int>(f.get_int("field", "filaments", c.field.filaments));
  c.field.dipole_enabled = f.has("field", "dipole_moment_am2");
  c.field.dipole_moment = f.get_number("field", "dipole_moment_am2", c.field.dipole_moment);
  c.field.dipole_depth = f.get_number("field", "dipole_depth_m", c.field.dipole_depth);
  c.field.uniform_t = {f.get_number("field", "uniform_bx_t", 0.0),
                       f.get_number("field", "uniform_by_t", 0.0),
                       f.get_number("field", "uniform_bz_t", 0.0)};

  const std::string mode = f.get_string("pipeline", "mode", "polarity");
  if (mode == "polarity") c.pipe.mode = pipeline::DifferentialMode::polarity;
  else if (mode == "gating") c.pipe.mode = pipeline::DifferentialMode::gating;
  else if (mode == "none") c.pipe.differential = false;
  else throw ConfigError("pipeline.mode must be polarity, gating or none");
  c.pipe.n_bin = static_cast<std::size_t>(f.get_int("pipeline", "n_bin", 1));
  c.pipe.framesets = static_cast<std::size_t>(f.get_int("pipeline", "framesets", 16));
  c.pipe.frames_per_set =
      static_cast<std::size_t>(f.get_int("pipeline", "frames_per_set", 500));
  c.pipe.highpass_sigma_m =
      f.get_number("pipeline", "highpass_sigma_m", c.pipe.highpass_sigma_m);
  c.pipe.per_frame_noise_t =
      f.get_number("pipeline", "per_frame_noise_t", c.pipe.per_frame_noise_t);
  c.pipe.border_exclude_px =
      static_cast<std::size_t>(f.get_int("pipeline", "border_exclude_px", 0));
  if (f.has("pipeline", "signal_roi") != f.has("pipeline", "noise_roi")) {
    throw ConfigError("pipeline: signal_roi and noise_roi must be given together");
  }
  if (f.has("pipeline", "signal_roi")) {
    c.pipe.signal_roi = parse_roi(f.get_string("pipeline", "signal_roi", ""), "signal_roi");
    c.pipe.noise_roi = parse_roi(f.get_string("pipeline", "noise_roi", ""), "noise_roi");
    c.pipe.rois_set = true;
  }

  c.den.search_px = static_cast<int>(f.get_int("denoise", "search_px", c.den.search_px));
  c.den.template_px = static_cast<int>(f.get_int("denoise", "template_px", c.den.template_px));
  c.den.h_scale = f.get_number("denoise", "h_scale", c.den.h_scale);
  c.den.h_t = f.get_number("denoise", "h_t", c.den.h_t);

  c.wave.source = f.get_string("waveform", "source", c.wave.source);
  c.wave.duration_s = f.get_number("waveform", "duration_s", c.wave.duration_s);
  c.wave.beat_hz = f.get_number("waveform", "beat_hz", c.wave.beat_hz);
  c.wave.peak_v = f.get_number("waveform", "peak_v", c.wave.peak_v);
  c.wave.scale_nt_per_v = f.get_number("waveform", "scale_nt_per_v", c.wave.scale_nt_per_v);
  c.wave.repeats = static_cast<std::size_t>(f.get_int("waveform", "repeats", 400));

  c.bath.p1.g_perp = f.get_number("bath", "g_perp", c.bath.p1.g_perp);
  c.bath.p1.g_par = f.get_number("bath", "g_par", c.bath.p1.g_par);
  c.bath.p1.a_perp = f.get_number("bath", "a_perp_hz", c.bath.p1.a_perp);
  c.bath.p1.a_par = f.get_number("bath", "a_par_hz", c.bath.p1.a_par);
  c.bath.b_mag_t = f.get_number("bath", "b_mag_t", c.bath.b_mag_t);
  c.bath.p1.b_field = {0.0, 0.0, c.bath.b_mag_t};
  c.bath.rabi_hz = f.get_number("bath", "rabi_hz", c.bath.rabi_hz);
  c.bath.line_width_hz = f.get_number("bath", "line_width_hz", c.bath.line_width_hz);
  c.bath.line_contrast = f.get_number("bath", "line_contrast", c.bath.line_contrast);
  c.bath.t2_nv_s = f.get_number("bath", "t2_nv_s", c.bath.t2_nv_s);
  c.bath.t2_undriven_s = f.get_number("bath", "t2_undriven_s", c.bath.t2_undriven_s);
  c.bath.t2_driven_target_s =
      f.get_number("bath", "t2_driven_target_s", c.bath.t2_driven_target_s);
  return c;
}

}  // namespace qdm::config
