#pragma once

#include <cmath>
#include <cstdint>

namespace qsfl::rng {

// splitmix64 finalizer: bijective 64-bit avalanche mix.
inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Counter-based stream: draw j of trial i depends only on (seed, i, j), so
// trials can be evaluated in any order or on any thread with identical
// results. Each trial owns a fixed budget of draw slots.
class TrialStream {
 public:
  static constexpr std::uint64_t kDrawsPerTrial = 32;

  TrialStream(std::uint64_t seed, std::uint64_t trial)
      : base_(mix(seed ^ 0x6A09E667F3BCC909ULL) + trial * kDrawsPerTrial) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    const std::uint64_t v = mix((base_ + ctr_++) * 0x9E3779B97F4A7C15ULL);
    return static_cast<double>(v >> 11) * 0x1.0p-53;
  }

  // Exp(1) by inversion; finite for every representable uniform.
  double next_exp() { return -std::log1p(-next_unit()); }

 private:
  std::uint64_t base_;
  std::uint64_t ctr_ = 0;
};

}  // namespace qsfl::rng
