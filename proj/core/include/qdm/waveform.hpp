#pragma once

#include <filesystem>
#include <vector>

namespace qdm {

/// Sampled voltage trace: strictly increasing time (s), voltage (V).
struct Waveform {
  std::vector<double> time;
  std::vector<double> voltage;

  std::size_t size() const { return time.size(); }

  /// Linear interpolation; clamps outside the sampled span.
  double at(double t) const;

  /// Sample at t0 + k*dt for k in [0, count).
  std::vector<double> resample(double t0, double dt, std::size_t count) const;
};

/// Loads a two-column CSV (time_s, voltage_v). Lines starting with '#' and
/// a single leading header line are skipped. Throws on non-numeric cells
/// and on a non-monotone time column.
Waveform load_waveform(const std::filesystem::path& path);

void write_waveform(const Waveform& w, const std::filesystem::path& path);

/// Synthetic broadband cardiac-like trace: per beat a P bump, a sharp
/// biphasic QRS complex, and a broad T bump. Peak is normalized to
/// `peak_volts`. Deterministic.
Waveform synth_cardiac(double duration_s, double sample_rate_hz,
                       double beat_hz = 1.2, double peak_volts = 0.025);

}  // namespace qdm
