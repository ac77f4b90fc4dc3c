#pragma once

#include <cstdint>
#include <random>

namespace aisolsr {

/// mt19937_64 output is fixed by the standard; the distributions in <random>
/// are not, so every draw goes through the helpers below.
using Rng = std::mt19937_64;

enum class StreamKind : std::uint64_t {
  mobility = 1,
  timers = 2,
  radio = 3,
  traffic = 4,
  placement = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream keyed by (scenario seed, purpose, index).
inline Rng make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t index = 0) {
  const std::uint64_t k = splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(kind) << 32 | index));
  return Rng(k);
}

/// Uniform in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

}  // namespace aisolsr
