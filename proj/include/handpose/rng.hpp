#pragma once

#include <cstdint>
#include <random>

namespace handpose {

/// Seeded random source shared by every stochastic operation.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, so draws are
/// identical on every standard library.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform in [lo, hi]; never leaves the interval even after rounding.
inline double uniform_in(Rng& rng, double lo, double hi) {
  const double x = lo + uniform01(rng) * (hi - lo);
  return x > hi ? hi : x;
}

}  // namespace handpose
