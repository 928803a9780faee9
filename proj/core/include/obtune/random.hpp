#pragma once

#include <cstdint>
#include <limits>

namespace obtune {

// SplitMix64 stream generator. The whole update is four lines of integer
// arithmetic (see docs/determinism.md), so a session stream can be replayed
// from its seed in any language. Known-answer tests freeze the output.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): the top 53 bits scaled by 2^-53.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], both ends inclusive. Uses a plain modulo
  // reduction; for the spans this library deals in the bias is below 2^-50.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  // std::uniform_random_bit_generator interface
  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  std::uint64_t state() const { return state_; }

private:
  std::uint64_t state_;
};

// Substream seed derivation: mix(seed, i) equals the (i+1)-th output of
// SplitMix64(seed), computed in O(1). Bootstrap records, tuning loops and
// multi-pass passes each get their own substream through this.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace obtune
