#include "qdm/field_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdm {

FieldMap bin_pixels(const FieldMap& map, std::size_t n_bin) {
  if (n_bin < 1) throw std::invalid_argument("bin_pixels: n_bin must be >= 1");
  if (n_bin > map.width || n_bin > map.height) {
    throw std::invalid_argument("bin_pixels: n_bin exceeds map dimensions");
  }
  FieldMap out(map.width / n_bin, map.height / n_bin, map.pitch * static_cast<double>(n_bin));
  out.axis = map.axis;
  const double inv = 1.0 / static_cast<double>(n_bin * n_bin);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_bin; ++i) {
        for (std::size_t j = 0; j < n_bin; ++j) {
          sum += map.at(r * n_bin + i, c * n_bin + j);
        }
      }
      out.at(r, c) = sum * inv;
    }
  }
  return out;
}

double map_mean(const FieldMap& map) {
  double sum = 0.0;
  for (double v : map.values) sum += v;
  return sum / static_cast<double>(map.size());
}

double map_std(const FieldMap& map, std::size_t margin) {
  if (2 * margin >= map.width || 2 * margin >= map.height) {
    throw std::invalid_argument("map_std: margin swallows the whole map");
  }
  double sum = 0.0, count = 0.0;
  for (std::size_t r = margin; r < map.height - margin; ++r) {
    for (std::size_t c = margin; c < map.width - margin; ++c) {
      sum += map.at(r, c);
      count += 1.0;
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t r = margin; r < map.height - margin; ++r) {
    for (std::size_t c = margin; c < map.width - margin; ++c) {
      const double d = map.at(r, c) - mean;
      ss += d * d;
    }
  }
  return std::sqrt(ss / count);
}

namespace {

template <typename Fold>
void roi_fold(const FieldMap& map, const PixelRoi& roi, Fold&& fold) {
  if (!roi.inside(map)) throw std::invalid_argument("roi outside map bounds");
  for (std::size_t r = roi.row0; r <= roi.row1; ++r) {
    for (std::size_t c = roi.col0; c <= roi.col1; ++c) fold(map.at(r, c));
  }
}

}  // namespace

double roi_min(const FieldMap& map, const PixelRoi& roi) {
  double m = std::numeric_limits<double>::infinity();
  roi_fold(map, roi, [&](double v) { m = std::min(m, v); });
  return m;
}

double roi_max(const FieldMap& map, const PixelRoi& roi) {
  double m = -std::numeric_limits<double>::infinity();
  roi_fold(map, roi, [&](double v) { m = std::max(m, v); });
  return m;
}

double roi_mean(const FieldMap& map, const PixelRoi& roi) {
  double sum = 0.0, n = 0.0;
  roi_fold(map, roi, [&](double v) {
    sum += v;
    n += 1.0;
  });
  return sum / n;
}

double roi_std(const FieldMap& map, const PixelRoi& roi) {
  const double mean = roi_mean(map, roi);
  double ss = 0.0, n = 0.0;
  roi_fold(map, roi, [&](double v) {
    ss += (v - mean) * (v - mean);
    n += 1.0;
  });
  return std::sqrt(ss / n);
}

FieldMap map_lincomb(double a, const FieldMap& ma, double b, const FieldMap& mb) {
  if (!ma.same_shape(mb)) throw std::invalid_argument("map_lincomb: shape mismatch");
  FieldMap out(ma.width, ma.height, ma.pitch);
  out.axis = ma.axis;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = a * ma.values[i] + b * mb.values[i];
  }
  return out;
}

}  // namespace qdm
