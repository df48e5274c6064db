#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cdsched {

/// One splitmix64 step. Used only to derive independent seeds; the stream
/// itself comes from mt19937_64, whose output is pinned by the standard and
/// therefore identical across platforms and library versions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream-splitting rule: substream `stream` of `seed` is seeded with
/// splitmix64(seed XOR golden-ratio * (stream + 1)). Deterministic, and
/// distinct streams never share mt19937_64 seeds in practice.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  return splitmix64(s);
}

/// Seeded random source with bit-reproducible output everywhere: raw 64-bit
/// words from mt19937_64, uniforms via the top 53 bits, exponentials via the
/// inverse CDF. Standard-library distribution objects are deliberately not
/// used because their output is implementation-defined.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  static SplitRng derive(std::uint64_t seed, std::uint64_t stream) {
    return SplitRng(mix_seed(seed, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given mean; mean <= 0 degenerates to constant 0.
  double exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    return -mean * std::log1p(-uniform01());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cdsched
