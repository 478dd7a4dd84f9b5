#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qdm/biot_savart.hpp"
#include "qdm/grid_io.hpp"

namespace qdm::field {

WirePhantom load_phantom_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  WirePhantom p;
  p.current = 0.0;
  std::map<long, std::vector<Vec3>> by_trace;
  std::vector<long> order;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    if (cells.size() == 2) {
      const double v = std::stod(cells[1]);
      if (cells[0] == "width_m") p.width = v;
      else if (cells[0] == "thickness_m") p.thickness = v;
      else if (cells[0] == "current_a") p.current = v;
      else if (cells[0] == "filaments") p.filaments = static_cast<int>(v);
      else throw std::runtime_error("unknown header record '" + cells[0] + "' at " + ctx);
      continue;
    }
    if (cells.size() != 4) {
      throw std::runtime_error("expected trace_id,x_m,y_m,z_m at " + ctx);
    }
    long id = 0;
    Vec3 v;
    try {
      id = std::stol(cells[0]);
      v = {std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])};
    } catch (const std::exception&) {
      throw std::runtime_error("non-numeric vertex row at " + ctx);
    }
    if (by_trace.find(id) == by_trace.end()) order.push_back(id);
    by_trace[id].push_back(v);
  }
  for (long id : order) p.traces.push_back(std::move(by_trace[id]));
  p.validate();
  return p;
}

void write_phantom_csv(const WirePhantom& p, const std::filesystem::path& path) {
  p.validate();
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << "width_m," << format_double(p.width) << '\n';
  os << "thickness_m," << format_double(p.thickness) << '\n';
  os << "current_a," << format_double(p.current) << '\n';
  os << "filaments," << p.filaments << '\n';
  for (std::size_t t = 0; t < p.traces.size(); ++t) {
    for (const Vec3& v : p.traces[t]) {
      os << t << ',' << format_double(v.x) << ',' << format_double(v.y) << ','
         << format_double(v.z) << '\n';
    }
  }
}

WirePhantom serpentine_phantom(int legs, double leg_length, double spacing,
                               double current) {
  if (legs < 2) throw std::invalid_argument("serpentine needs at least 2 legs");
  WirePhantom p;
  p.current = current;
  std::vector<Vec3> trace;
  const double x_half = 0.5 * leg_length;
  const double y_top = 0.5 * spacing * static_cast<double>(legs - 1);
  for (int i = 0; i < legs; ++i) {
    const double y = y_top - spacing * static_cast<double>(i);
    const bool left_to_right = (i % 2 == 0);
    const double x_start = left_to_right ? -x_half : x_half;
    const double x_end = left_to_right ? x_half : -x_half;
    if (i == 0) trace.push_back({x_start, y, 0.0});
    trace.push_back({x_end, y, 0.0});
    if (i + 1 < legs) trace.push_back({x_end, y - spacing, 0.0});
  }
  p.traces.push_back(std::move(trace));
  p.validate();
  return p;
}

}  // namespace qdm::field
