#include "qdm/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qdm/grid_io.hpp"

namespace qdm::report {

void Report::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void Report::add(const std::string& key, double value) {
  entries_.emplace_back(key, format_double(value));
}

void Report::add_si(const std::string& key, double value, const std::string& unit) {
  entries_.emplace_back(key, format_double(value) + " " + unit);
}

std::string Report::render() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += ": ";
    out += v;
    out += '\n';
  }
  return out;
}

void Report::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << render();
}

void write_curve_svg(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::filesystem::path& path, bool log_x, bool log_y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("write_curve_svg: bad curve");
  }
  const auto tf = [](double v, bool log_axis) {
    return log_axis ? std::log10(std::max(v, 1e-300)) : v;
  };
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x_lo = std::min(x_lo, tf(x[i], log_x));
    x_hi = std::max(x_hi, tf(x[i], log_x));
    y_lo = std::min(y_lo, tf(y[i], log_y));
    y_hi = std::max(y_hi, tf(y[i], log_y));
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const double w = 640, h = 480, m = 60;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\""
     << h - 2 * m << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1668c9\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double px = m + (tf(x[i], log_x) - x_lo) / (x_hi - x_lo) * (w - 2 * m);
    const double py = h - m - (tf(y[i], log_y) - y_lo) / (y_hi - y_lo) * (h - 2 * m);
    os << px << ',' << py << ' ';
  }
  os << "\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">"
     << x_label << (log_x ? " (log10)" : "") << "</text>\n";
  os << "<text x=\"18\" y=\"" << h / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << h / 2 << ")\">" << y_label
     << (log_y ? " (log10)" : "") << "</text>\n";
  os << "</svg>\n";
}

void write_manifest(const std::vector<std::filesystem::path>& artifacts,
                    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> sorted = artifacts;
  std::sort(sorted.begin(), sorted.end());
  std::ofstream os(dir / "manifest.txt", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
  for (const auto& p : sorted) {
    os << p.filename().string() << ' ' << file_hash_hex(p) << ' '
       << std::filesystem::file_size(p) << '\n';
  }
}

}  // namespace qdm::report
