#pragma once

#include <cstdint>
#include <random>

namespace tteda {

using Rng = std::mt19937_64;

// The std distributions are implementation-defined; these helpers give the
// same stream on every standard library.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection sampled. n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

} // namespace tteda
