#pragma once

#include <cstdint>

namespace kgrec {

// SplitMix64. Small, fast, and bit-identical on every platform, which is what
// the reproducibility contract needs; std::mt19937 distributions are
// implementation-defined and unusable for frozen expectations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    // rejection threshold: lowest multiple of n that fits makes x % n fair
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  // Double in [0, 1), 53 usable bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Independent stream for (seed, key). Streams for distinct keys are
// decorrelated, so per-entity / per-user work needs no shared generator.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t key) {
  SplitMix64 mixer(seed ^ (0xA24BAED4963EE407ULL * (key + 1)));
  return SplitMix64(mixer.next());
}

}  // namespace kgrec
