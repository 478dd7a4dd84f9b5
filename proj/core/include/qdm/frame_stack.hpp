#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qdm/field_map.hpp"

namespace qdm {

/// Role of a frame set within the differential measurement protocol.
enum class ProtocolTag { plain, polarity_plus, polarity_minus, gated_on, gated_off };

std::string to_string(ProtocolTag tag);
ProtocolTag protocol_tag_from_string(const std::string& s);

/// Time-ordered camera frames in device units (DU). Frames hold on-chip
/// accumulated differences, hence signed values in [-1023, 1023]. The
/// on-disk payload is f32; in memory the grids stay double so DU <-> field
/// conversions round-trip at full precision.
struct FrameStack {
  std::size_t width = 0;
  std::size_t height = 0;
  double frame_rate = 0.0;  // Hz, external frame rate F_s
  ProtocolTag protocol_tag = ProtocolTag::plain;
  std::vector<std::vector<double>> frames;  // row-major DU grids

  FrameStack() = default;
  FrameStack(std::size_t w, std::size_t h, double rate, std::size_t n_frames)
      : width(w), height(h), frame_rate(rate),
        frames(n_frames, std::vector<double>(w * h, 0.0)) {}

  std::size_t frame_count() const { return frames.size(); }
  std::size_t pixels() const { return width * height; }
};

/// Frame series converted to field units (tesla per pixel per frame).
struct FieldStack {
  std::size_t width = 0;
  std::size_t height = 0;
  double frame_rate = 0.0;  // Hz
  double pitch = 1.9e-6;    // m per pixel
  std::vector<std::vector<double>> frames;

  FieldStack() = default;
  FieldStack(std::size_t w, std::size_t h, double rate, std::size_t n_frames,
             double pitch_m = 1.9e-6)
      : width(w), height(h), frame_rate(rate), pitch(pitch_m),
        frames(n_frames, std::vector<double>(w * h, 0.0)) {}

  std::size_t frame_count() const { return frames.size(); }
  std::size_t pixels() const { return width * height; }

  FieldMap frame_as_map(std::size_t i) const {
    FieldMap m(width, height, pitch);
    m.values = frames[i];
    return m;
  }

  /// Pixel-wise mean over all frames.
  FieldMap time_average() const;
};

}  // namespace qdm
