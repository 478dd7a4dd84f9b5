#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qdm {

/// 2D scalar grid of axis-projected magnetic field values (tesla),
/// row-major, with the pixel pitch in metres. Immutable by convention:
/// operations return new maps.
struct FieldMap {
  std::size_t width = 0;
  std::size_t height = 0;
  double pitch = 1.9e-6;  // m per pixel
  std::vector<double> values;  // row-major, height*width entries
  std::string axis;  // crystal-axis label of the projection, e.g. "111"

  FieldMap() = default;
  FieldMap(std::size_t w, std::size_t h, double pitch_m, double fill = 0.0)
      : width(w), height(h), pitch(pitch_m), values(w * h, fill) {}

  double& at(std::size_t row, std::size_t col) { return values[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
  std::size_t size() const { return values.size(); }

  bool same_shape(const FieldMap& o) const {
    return width == o.width && height == o.height;
  }
};

/// Rectangular pixel region, half-open on neither end: rows [row0, row1],
/// cols [col0, col1], all inclusive.
struct PixelRoi {
  std::size_t row0 = 0, col0 = 0, row1 = 0, col1 = 0;

  bool inside(const FieldMap& m) const {
    return row0 <= row1 && col0 <= col1 && row1 < m.height && col1 < m.width;
  }
  bool overlaps(const PixelRoi& o) const {
    return !(row1 < o.row0 || o.row1 < row0 || col1 < o.col0 || o.col1 < col0);
  }
};

/// n_bin x n_bin block averaging. Output is floor(w/n) x floor(h/n), each
/// output pixel the arithmetic mean of its block; trailing remainder rows
/// and columns are dropped; pitch scales by n_bin.
FieldMap bin_pixels(const FieldMap& map, std::size_t n_bin);

/// Mean over all pixels.
double map_mean(const FieldMap& map);

/// Population standard deviation over all pixels (optionally excluding a
/// border of `margin` pixels on every side).
double map_std(const FieldMap& map, std::size_t margin = 0);

double roi_min(const FieldMap& map, const PixelRoi& roi);
double roi_max(const FieldMap& map, const PixelRoi& roi);
double roi_mean(const FieldMap& map, const PixelRoi& roi);
double roi_std(const FieldMap& map, const PixelRoi& roi);

/// Pixel-wise a*ma + b*mb.
FieldMap map_lincomb(double a, const FieldMap& ma, double b, const FieldMap& mb);

}  // namespace qdm
