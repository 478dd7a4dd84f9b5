#include "qdm/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qdm/grid_io.hpp"

namespace qdm {

double Waveform::at(double t) const {
  if (time.empty()) throw std::logic_error("empty waveform");
  if (t <= time.front()) return voltage.front();
  if (t >= time.back()) return voltage.back();
  const auto it = std::upper_bound(time.begin(), time.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - time.begin());
  const std::size_t lo = hi - 1;
  const double f = (t - time[lo]) / (time[hi] - time[lo]);
  return voltage[lo] + f * (voltage[hi] - voltage[lo]);
}

std::vector<double> Waveform::resample(double t0, double dt, std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = at(t0 + dt * static_cast<double>(k));
  return out;
}

namespace {

double parse_cell(const std::string& cell, const std::string& context) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("non-numeric cell '" + cell + "' in " + context);
  }
  while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
  if (pos != cell.size()) {
    throw std::runtime_error("non-numeric cell '" + cell + "' in " + context);
  }
  return v;
}

bool looks_numeric(const std::string& s) {
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') {
      return true;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return false;
  }
  return false;
}

}  // namespace

Waveform load_waveform(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  Waveform w;
  std::string line;
  bool first_data_line = true;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string t_cell, v_cell;
    if (!std::getline(row, t_cell, ',') || !std::getline(row, v_cell)) {
      throw std::runtime_error("expected two comma-separated columns at " +
                               path.string() + ":" + std::to_string(line_no));
    }
    if (first_data_line && !looks_numeric(t_cell)) {
      first_data_line = false;  // header line
      continue;
    }
    first_data_line = false;
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    const double t = parse_cell(t_cell, ctx);
    const double v = parse_cell(v_cell, ctx);
    if (!w.time.empty() && t <= w.time.back()) {
      throw std::runtime_error("time column not strictly increasing at " + ctx);
    }
    w.time.push_back(t);
    w.voltage.push_back(v);
  }
  if (w.time.empty()) throw std::runtime_error("no samples in " + path.string());
  return w;
}

void write_waveform(const Waveform& w, const std::filesystem::path& path) {
  write_curve_csv(w.time, w.voltage, "time_s", "voltage_v", path);
}

Waveform synth_cardiac(double duration_s, double sample_rate_hz, double beat_hz,
                       double peak_volts) {
  if (duration_s <= 0.0 || sample_rate_hz <= 0.0 || beat_hz <= 0.0) {
    throw std::invalid_argument("synth_cardiac: non-positive argument");
  }
  const auto bump = [](double t, double center, double width) {
    const double u = (t - center) / width;
    return std::exp(-0.5 * u * u);
  };
  const std::size_t n = static_cast<std::size_t>(std::ceil(duration_s * sample_rate_hz));
  Waveform w;
  w.time.resize(n);
  w.voltage.resize(n);
  const double period = 1.0 / beat_hz;
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sample_rate_hz;
    const double phase = std::fmod(t, period);
    // P wave, biphasic QRS, T wave; widths scale with the beat period.
    double v = 0.40 * bump(phase, 0.18 * period, 0.040 * period)
             - 0.22 * bump(phase, 0.295 * period, 0.012 * period)
             + 1.00 * bump(phase, 0.320 * period, 0.017 * period)
             - 0.30 * bump(phase, 0.345 * period, 0.012 * period)
             + 0.70 * bump(phase, 0.56 * period, 0.075 * period);
    w.time[k] = t;
    w.voltage[k] = v;
    peak = std::max(peak, std::abs(v));
  }
  for (double& v : w.voltage) v *= peak_volts / peak;
  return w;
}

}  // namespace qdm
