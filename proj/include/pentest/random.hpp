#pragma once

#include <cstdint>
#include <random>

namespace pentest {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-trial streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream for trial `index` under `master_seed`. Streams depend only on the
/// pair, so trials can run on any worker in any order.
inline Rng trial_rng(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1): the midpoints of the 2^53 cells of uniform01.
inline double uniform01_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace pentest
