#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace codit {

/// Deterministic random stream. Distributions are hand-rolled on top of the
/// raw mt19937_64 output so that draws are bit-identical across standard
/// library implementations; std::*_distribution makes no such promise.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n); rejection sampling.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x > bound);
    return x % n;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
};

/// Stable seed derivation: FNV-1a accumulation over tagged components, then a
/// splitmix64 finalizer. Parallel workers derive per-item streams from the
/// master seed, so evaluation order and worker count cannot change results.
class SeedDeriver {
 public:
  explicit SeedDeriver(std::uint64_t master) { mix(master); }

  SeedDeriver& mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xff;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  SeedDeriver& mix(std::string_view s) {
    for (unsigned char c : s) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    mix(static_cast<std::uint64_t>(s.size()));
    return *this;
  }

  std::uint64_t finish() const {
    std::uint64_t z = state_ + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  SeedStream stream() const { return SeedStream(finish()); }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;  // FNV offset basis
};

}  // namespace codit
