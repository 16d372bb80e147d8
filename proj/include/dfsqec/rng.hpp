#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dfsqec {

inline std::uint64_t splitmix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

// Counter-based stream splitting: the seed depends only on the master seed and the keys.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ull));
  return h;
}

enum Stream : std::uint64_t { kNoiseStream = 1, kTieBreakStream = 2, kZoneStream = 3, kSyntheticStream = 4 };

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace dfsqec
