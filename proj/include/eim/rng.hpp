#pragma once

#include <cmath>
#include <cstdint>

namespace eim {

// SplitMix64 finalizer. Used to derive independent substream seeds from a
// master seed plus stream coordinates, so generation order and host
// parallelism cannot change the random values any entity sees.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed ^ (0x9e3779b97f4a7c15ull * (a + 1))) ^ (0xc2b2ae3d27d4eb4full * (b + 1)));
}

// PCG32 (O'Neill). 64-bit state, 32-bit output. Small enough to seed one
// instance per (edge, pixel) substream.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t seq = 0xda3e39cb94b95bdbull) {
    inc_ = (seq << 1) | 1u;
    state_ = 0;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ull + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
    const auto rot = static_cast<std::uint32_t>(old >> 59);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  bool next_bit() { return (next_u32() >> 17) & 1u; }

  // Uniform in (0,1), never exactly 0 or 1.
  double uniform() { return (next_u32() + 0.5) * (1.0 / 4294967296.0); }

  double exponential(double mean) {
    const double u = uniform();
    return mean > 0.0 ? -mean * std::log(u) : 0.0;
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Knuth's product method, chunked so exp() stays in range for large means.
  // Exact Poisson distribution for any mean by additivity.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 16.0) {
      total += poisson_small(16.0);
      mean -= 16.0;
    }
    if (mean > 0.0) total += poisson_small(mean);
    return total;
  }

 private:
  std::uint64_t poisson_small(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

}  // namespace eim
