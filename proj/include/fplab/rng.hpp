#pragma once

#include <cstdint>

namespace fplab {

// SplitMix64: the output at step n is a bijective hash of seed + n*gamma, so
// each stream is a pure function of (seed, counter) with period 2^64.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Deterministic per-replication substream: the observable draw sequence is a
// function of (master_seed, index) only, independent of scheduling.
inline SplitMix64 substream(std::uint64_t master_seed, std::uint64_t index) {
  const std::uint64_t seed =
      SplitMix64::mix(master_seed + SplitMix64::kGamma * (index + 1));
  return SplitMix64(seed ^ 0xA5A5A5A55A5A5A5Aull);
}

}  // namespace fplab
