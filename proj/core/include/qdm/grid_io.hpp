#pragma once

#include <filesystem>
#include <string>

#include "qdm/field_map.hpp"
#include "qdm/frame_stack.hpp"

namespace qdm {

// Field-map binary: magic "QDMF", u32 LE width, u32 LE height, f64 LE pitch,
// f64 LE payload row-major. Lossless for every finite double including
// signed zero. The axis label is not part of the format.
void write_field_map(const FieldMap& map, const std::filesystem::path& path);
FieldMap read_field_map(const std::filesystem::path& path);

// Frame-stack binary: magic "QDMS", u32 LE width, height, frame count,
// f64 LE frame rate, f32 LE payload per frame row-major.
void write_frame_stack(const FrameStack& stack, const std::filesystem::path& path);
FrameStack read_frame_stack(const std::filesystem::path& path);

// CSV export: row-major, '\n' rows, ',' columns, full double precision.
void write_map_csv(const FieldMap& map, const std::filesystem::path& path);
void write_frame_csv(const FrameStack& stack, std::size_t frame,
                     const std::filesystem::path& path);

/// Two-column CSV (x, y) with full double precision, one header line.
void write_curve_csv(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::filesystem::path& path);

/// Full-precision decimal rendering that round-trips a double.
std::string format_double(double v);

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits (manifests).
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace qdm
