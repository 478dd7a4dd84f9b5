#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qdm/field_map.hpp"
#include "qdm/grid_io.hpp"
#include "qdm/rng.hpp"
#include "qdm/waveform.hpp"

using namespace qdm;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("bin_pixels identity and block mean") {
  FieldMap m(2, 2, 1.9e-6);
  m.values = {1, 3, 5, 7};
  const FieldMap same = bin_pixels(m, 1);
  CHECK(same.values == m.values);
  const FieldMap one = bin_pixels(m, 2);
  REQUIRE(one.width == 1);
  REQUIRE(one.height == 1);
  CHECK(one.values[0] == doctest::Approx(4.0));
  CHECK(one.pitch == doctest::Approx(3.8e-6));
}

TEST_CASE("bin_pixels drops remainder rows and columns") {
  FieldMap m(5, 4, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = static_cast<double>(i);
  const FieldMap out = bin_pixels(m, 2);
  CHECK(out.width == 2);
  CHECK(out.height == 2);
  // top-left block: rows 0-1, cols 0-1 of a width-5 map
  CHECK(out.at(0, 0) == doctest::Approx((0 + 1 + 5 + 6) / 4.0));
  CHECK_THROWS(bin_pixels(m, 6));
}

TEST_CASE("bin_pixels reduces iid noise std by n_bin") {
  // Monte-Carlo oracle: 3x3 binning of unit white noise gives std 1/3.
  const CounterRng rng(7);
  FieldMap m(300, 300, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = rng.normal(i, 0);
  const FieldMap binned = bin_pixels(m, 3);
  REQUIRE(binned.size() == 10000);
  CHECK(map_std(binned) == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("bin_pixels is linear and mean-preserving") {
  const CounterRng rng(11);
  FieldMap a(9, 9, 1.0), b(9, 9, 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.values[i] = rng.normal(i, 1);
    b.values[i] = rng.normal(i, 2);
  }
  const FieldMap lhs = bin_pixels(map_lincomb(2.5, a, -1.25, b), 3);
  const FieldMap rhs = map_lincomb(2.5, bin_pixels(a, 3), -1.25, bin_pixels(b, 3));
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    CHECK(lhs.values[i] == doctest::Approx(rhs.values[i]).epsilon(1e-12));
  }
  CHECK(map_mean(bin_pixels(a, 3)) == doctest::Approx(map_mean(a)).epsilon(1e-12));
}

TEST_CASE("field map binary round trip is bit-exact") {
  FieldMap m(3, 2, 1.9e-6);
  m.values = {0.0, -0.0, 1e-12, -1e-12, 3.5e-9, -7.25e-8};
  const auto path = temp_file("qdm_test_map.qdmf");
  write_field_map(m, path);
  const FieldMap back = read_field_map(path);
  REQUIRE(back.width == m.width);
  REQUIRE(back.height == m.height);
  CHECK(back.pitch == m.pitch);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(std::memcmp(&back.values[i], &m.values[i], sizeof(double)) == 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("field map reader rejects bad magic and truncation") {
  const auto path = temp_file("qdm_test_bad.qdmf");
  {
    std::ofstream os(path, std::ios::binary);
    os << "QXMF";
    os.write("\0\0\0\0\0\0\0\0", 8);
  }
  CHECK_THROWS_WITH_AS(read_field_map(path), doctest::Contains("bad magic"),
                       std::runtime_error);
  FieldMap m(4, 4, 1e-6);
  write_field_map(m, path);
  std::filesystem::resize_file(path, 40);  // chop the payload
  CHECK_THROWS_WITH_AS(read_field_map(path), doctest::Contains("truncated"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("frame stack round trip") {
  // The payload is f32 on disk; f32-representable DU values round-trip
  // exactly.
  FrameStack s(3, 2, 528.0, 4);
  double v = -1023.0;
  for (auto& f : s.frames) {
    for (auto& x : f) {
      x = v;
      v += 97.25;
    }
  }
  const auto path = temp_file("qdm_test_stack.qdms");
  write_frame_stack(s, path);
  const FrameStack back = read_frame_stack(path);
  REQUIRE(back.frame_count() == 4);
  CHECK(back.frame_rate == s.frame_rate);
  for (std::size_t f = 0; f < 4; ++f) CHECK(back.frames[f] == s.frames[f]);
  std::filesystem::remove(path);
}

TEST_CASE("waveform parsing, interpolation and errors") {
  const auto path = temp_file("qdm_test_wave.csv");
  {
    std::ofstream os(path);
    os << "0,0\n1,1\n";
  }
  const Waveform w = load_waveform(path);
  REQUIRE(w.size() == 2);
  CHECK(w.at(0.5) == doctest::Approx(0.5));
  CHECK(w.at(-1.0) == 0.0);  // clamped
  {
    std::ofstream os(path);
    os << "0,0\n-1,1\n";
  }
  CHECK_THROWS_WITH_AS(load_waveform(path), doctest::Contains("increasing"),
                       std::runtime_error);
  {
    std::ofstream os(path);
    os << "0,zero\n1,1\n";
  }
  CHECK_THROWS_WITH_AS(load_waveform(path), doctest::Contains("non-numeric"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic cardiac trace is normalized and broadband") {
  const Waveform w = synth_cardiac(1.0, 10000.0, 1.2, 0.025);
  double peak = 0.0, sum_sq = 0.0;
  for (double v : w.voltage) {
    peak = std::max(peak, std::abs(v));
    sum_sq += v * v;
  }
  CHECK(peak == doctest::Approx(0.025));
  // RMS-to-peak ratio matters for reconstruction fidelity at fixed SNR.
  const double rms = std::sqrt(sum_sq / static_cast<double>(w.size()));
  CHECK(rms / peak > 0.3);
}

TEST_CASE("counter rng is order-independent and seeded") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.uniform(5, 100) == b.uniform(5, 100));
  CHECK(a.uniform(5, 100) != c.uniform(5, 100));
  // Evaluation order does not matter.
  const double x1 = a.normal(1, 2);
  const double y1 = a.normal(9, 7);
  const double y2 = b.normal(9, 7);
  const double x2 = b.normal(1, 2);
  CHECK(x1 == x2);
  CHECK(y1 == y2);
}

TEST_CASE("counter rng normal moments") {
  const CounterRng rng(123);
  const std::size_t n = 200000;
  double sum = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng.normal(0, i);
    sum += v;
    ss += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = ss / static_cast<double>(n) - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("counter rng poisson mean and variance") {
  const CounterRng rng(9);
  for (const double lambda : {3.0, 400.0}) {
    const std::size_t n = 50000;
    double sum = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<double>(rng.poisson(lambda, 0, i));
      sum += v;
      ss += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = ss / static_cast<double>(n) - mean * mean;
    CHECK(mean == doctest::Approx(lambda).epsilon(0.02));
    CHECK(var == doctest::Approx(lambda).epsilon(0.05));
  }
}
