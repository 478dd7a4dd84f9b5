#include "qdm/grid_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qdm {

std::string to_string(ProtocolTag tag) {
  switch (tag) {
    case ProtocolTag::plain: return "plain";
    case ProtocolTag::polarity_plus: return "polarity_plus";
    case ProtocolTag::polarity_minus: return "polarity_minus";
    case ProtocolTag::gated_on: return "gated_on";
    case ProtocolTag::gated_off: return "gated_off";
  }
  return "plain";
}

ProtocolTag protocol_tag_from_string(const std::string& s) {
  if (s == "plain") return ProtocolTag::plain;
  if (s == "polarity_plus") return ProtocolTag::polarity_plus;
  if (s == "polarity_minus") return ProtocolTag::polarity_minus;
  if (s == "gated_on") return ProtocolTag::gated_on;
  if (s == "gated_off") return ProtocolTag::gated_off;
  throw std::invalid_argument("unknown protocol tag: " + s);
}

FieldMap FieldStack::time_average() const {
  if (frames.empty()) throw std::invalid_argument("time_average: empty stack");
  FieldMap out(width, height, pitch);
  for (const auto& f : frames) {
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += f[i];
  }
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : out.values) v *= inv;
  return out;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "grid formats are little-endian; byte swapping not implemented");

void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), 8);
}
std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4)) {
    throw std::runtime_error("truncated header");
  }
  return v;
}
double get_f64(std::ifstream& is) {
  double v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8)) {
    throw std::runtime_error("truncated header");
  }
  return v;
}

void check_magic(std::ifstream& is, const char* magic, const std::filesystem::path& path) {
  std::array<char, 4> got{};
  if (!is.read(got.data(), 4) || std::memcmp(got.data(), magic, 4) != 0) {
    throw std::runtime_error("bad magic in " + path.string() + ": expected " + magic);
  }
}

}  // namespace

void write_field_map(const FieldMap& map, const std::filesystem::path& path) {
  if (map.values.size() != map.width * map.height) {
    throw std::invalid_argument("field map size does not match dimensions");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os.write("QDMF", 4);
  put_u32(os, static_cast<std::uint32_t>(map.width));
  put_u32(os, static_cast<std::uint32_t>(map.height));
  put_f64(os, map.pitch);
  os.write(reinterpret_cast<const char*>(map.values.data()),
           static_cast<std::streamsize>(map.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

FieldMap read_field_map(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  check_magic(is, "QDMF", path);
  FieldMap map;
  map.width = get_u32(is);
  map.height = get_u32(is);
  map.pitch = get_f64(is);
  if (map.pitch <= 0.0) throw std::runtime_error("non-positive pitch in " + path.string());
  map.values.resize(map.width * map.height);
  if (!is.read(reinterpret_cast<char*>(map.values.data()),
               static_cast<std::streamsize>(map.values.size() * sizeof(double)))) {
    throw std::runtime_error("truncated payload in " + path.string());
  }
  return map;
}

void write_frame_stack(const FrameStack& stack, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os.write("QDMS", 4);
  put_u32(os, static_cast<std::uint32_t>(stack.width));
  put_u32(os, static_cast<std::uint32_t>(stack.height));
  put_u32(os, static_cast<std::uint32_t>(stack.frame_count()));
  put_f64(os, stack.frame_rate);
  std::vector<float> row(stack.pixels());
  for (const auto& f : stack.frames) {
    if (f.size() != stack.pixels()) {
      throw std::invalid_argument("frame size does not match stack dimensions");
    }
    for (std::size_t i = 0; i < f.size(); ++i) row[i] = static_cast<float>(f[i]);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

FrameStack read_frame_stack(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  check_magic(is, "QDMS", path);
  FrameStack stack;
  stack.width = get_u32(is);
  stack.height = get_u32(is);
  const std::uint32_t n = get_u32(is);
  stack.frame_rate = get_f64(is);
  if (stack.frame_rate <= 0.0) {
    throw std::runtime_error("non-positive frame rate in " + path.string());
  }
  stack.frames.assign(n, std::vector<double>(stack.pixels()));
  std::vector<float> row(stack.pixels());
  for (auto& f : stack.frames) {
    if (!is.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(float)))) {
      throw std::runtime_error("truncated payload in " + path.string());
    }
    for (std::size_t i = 0; i < row.size(); ++i) f[i] = static_cast<double>(row[i]);
  }
  return stack;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_map_csv(const FieldMap& map, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      if (c) os << ',';
      os << format_double(map.at(r, c));
    }
    os << '\n';
  }
}

void write_frame_csv(const FrameStack& stack, std::size_t frame,
                     const std::filesystem::path& path) {
  if (frame >= stack.frame_count()) throw std::invalid_argument("frame index out of range");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  const auto& f = stack.frames[frame];
  for (std::size_t r = 0; r < stack.height; ++r) {
    for (std::size_t c = 0; c < stack.width; ++c) {
      if (c) os << ',';
      os << format_double(f[r * stack.width + c]);
    }
    os << '\n';
  }
}

void write_curve_csv(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& x_label, const std::string& y_label,
                     const std::filesystem::path& path) {
  if (x.size() != y.size()) throw std::invalid_argument("curve columns differ in length");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << x_label << ',' << y_label << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
  }
}

std::string file_hash_hex(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 14];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!is) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace qdm
