#pragma once

#include <cstdint>
#include <random>

namespace qnet {

// The simulator's single source of randomness. mt19937_64 has a fully
// specified output sequence, and the helpers below avoid the
// implementation-defined std distributions, so traces are bit-exact across
// standard libraries.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double low, double high) {
  if (low == high) {
    rng();  // keep the draw count independent of the interval
    return low;
  }
  return low + (high - low) * uniform01(rng);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of several words into one seed.
template <typename... Words>
std::uint64_t mix_seed(std::uint64_t first, Words... rest) {
  std::uint64_t h = splitmix64(first);
  ((h = splitmix64(h ^ static_cast<std::uint64_t>(rest))), ...);
  return h;
}

}  // namespace qnet
