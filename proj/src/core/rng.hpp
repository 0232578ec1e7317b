#pragma once

#include <cstdint>

namespace neq {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so data streams can be replayed from any offset and across threads without
// shared state.
inline constexpr uint64_t splitmix64(uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr uint64_t mix2(uint64_t seed, uint64_t counter) noexcept {
  return splitmix64(seed ^ splitmix64(counter));
}

/// Uniform in [0,1) using the top 53 bits; bit-identical on every platform.
inline constexpr double unit_double(uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace neq
