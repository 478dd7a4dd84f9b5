#pragma once

#include <cmath>
#include <cstdint>

#include "qdm/constants.hpp"

namespace qdm {

// Counter-based random generator. Every variate is a pure function of
// (seed, stream, counter), so per-pixel noise streams can be evaluated in
// any order -- or in parallel -- and still reproduce bit-identically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t h = mix(seed_ + 0x9e3779b97f4a7c15ull);
    h = mix(h ^ stream);
    h = mix(h ^ counter);
    return h;
  }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes counters 2c and 2c+1.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 =
        (static_cast<double>(bits(stream, 2 * counter) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
  }

  /// Poisson variate. Inversion-by-search for small means, PTRS
  /// transformed rejection (Hormann 1993) above. Rejection retries hash a
  /// sub-counter, so the result is still order-independent.
  std::uint64_t poisson(double mean, std::uint64_t stream, std::uint64_t counter) const;

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double sub_uniform(std::uint64_t stream, std::uint64_t counter,
                     std::uint64_t attempt) const {
    std::uint64_t h = mix(bits(stream, counter) ^ attempt);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_;
};

inline std::uint64_t CounterRng::poisson(double mean, std::uint64_t stream,
                                         std::uint64_t counter) const {
  if (mean <= 0.0) return 0;
  std::uint64_t attempt = 0;
  if (mean < 30.0) {
    // Inversion: count exponential arrivals until the budget is spent.
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    while (true) {
      prod *= sub_uniform(stream, counter, attempt++);
      if (prod <= limit) return k;
      ++k;
    }
  }
  // PTRS
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    double u = sub_uniform(stream, counter, attempt++) - 0.5;
    double v = sub_uniform(stream, counter, attempt++);
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * std::log(mean) - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace qdm
