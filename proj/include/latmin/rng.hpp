#pragma once

#include <cstdint>

namespace latmin {

// SplitMix64: counter-based generator with a 64-bit seed.  Every random
// quantity in the library flows through explicit seeds, and parallel draws
// derive per-stream seeds with derive_seed(seed, index) so results are
// independent of scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // One SplitMix64 mixing round over seed ^ index keeps streams decorrelated
  // even for consecutive indices.
  std::uint64_t z = seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

}  // namespace latmin
