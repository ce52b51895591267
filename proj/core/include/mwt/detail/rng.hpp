#pragma once

#include <cmath>
#include <cstdint>

namespace mwt::detail {

// Fully specified generator primitives so that seeded runs reproduce
// byte-identically across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of the next state.
inline double next_unit(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

/// Standard Gaussian via Box-Muller.
inline double next_gaussian(std::uint64_t& state) {
  double u1 = next_unit(state);
  while (u1 <= 0.0) u1 = next_unit(state);
  const double u2 = next_unit(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

}  // namespace mwt::detail
