#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wrinkle {

/// splitmix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based hash of (seed, stream, counter); order-independent, so
/// parallel evaluation gives the same values as serial evaluation.
constexpr std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

/// Uniform in (0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal deviate keyed on (seed, stream, counter), via Box-Muller.
inline double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t h = keyed_hash(seed, stream, counter);
  const double u1 = to_unit(h);
  const double u2 = to_unit(mix64(h));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace wrinkle
