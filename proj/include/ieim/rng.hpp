#pragma once

#include <cmath>
#include <cstdint>

namespace ieim {

/// Minimal counter-based PRNG (splitmix64). Output is fully pinned by this
/// header, so simulations are bit-reproducible across platforms and worker
/// counts; std::random distributions are implementation-defined and are
/// deliberately not used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1].
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool next_bool() { return (next_u64() & 1u) != 0; }

  /// Exponential with unit rate.
  double next_exponential() { return -std::log(next_unit()); }

  /// Standard normal via Box-Muller.
  double next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_u64(std::uint64_t v) {
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
  return v ^ (v >> 31);
}

/// Derives an independent per-pixel stream from (seed, x, y, tag). Pixel
/// state never depends on worker count or iteration order.
inline SplitMix64 pixel_rng(std::uint64_t seed, std::uint32_t x, std::uint32_t y,
                            std::uint32_t tag) {
  std::uint64_t h = mix_u64(seed ^ 0xA0761D6478BD642FULL);
  h = mix_u64(h ^ ((static_cast<std::uint64_t>(y) << 32) | x));
  h = mix_u64(h ^ tag);
  return SplitMix64(h);
}

}  // namespace ieim
