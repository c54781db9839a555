#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace linsat {

// All randomness in the library flows from a single 64-bit seed through
// named substreams, so batch drivers stay deterministic regardless of the
// order in which instances are generated.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, std::string_view stream, uint64_t index = 0) {
  uint64_t h = seed;
  for (char c : stream) h = splitmix64(h ^ static_cast<uint64_t>(static_cast<unsigned char>(c)));
  return splitmix64(h ^ index);
}

inline std::mt19937_64 make_rng(uint64_t seed, std::string_view stream, uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

}  // namespace linsat
