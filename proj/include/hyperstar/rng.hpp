#pragma once

#include <cstdint>
#include <random>

namespace hyperstar {

// All randomness flows through mt19937_64 engines seeded from a master
// seed via splitmix64 mixing. Experiment outputs echo this identifier so
// runs can be attributed to the exact stream derivation.
using Rng = std::mt19937_64;
inline constexpr const char* kRngId = "mt19937_64";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed for (master, a, b): substream a of master, sub-substream b.
// Used as derive_seed(seed, trial) for per-trial streams and
// derive_seed(master, candidate) for per-candidate streams inside mc_mle.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Minimal splitmix64 engine: O(1) seeding, used where a fresh stream is
// needed per run (the Monte Carlo reference replays one stream per run
// index across all candidates).
struct SplitMix64 {
  using result_type = std::uint64_t;
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Unbiased integer in [0, n) by rejection (Lemire). n >= 1.
template <class Engine>
inline std::uint64_t uniform_u64(Engine& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform integer on the inclusive range [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_u64(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Uniform double in [0, 1) with 53-bit resolution.
template <class Engine>
inline double uniform_real01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace hyperstar
