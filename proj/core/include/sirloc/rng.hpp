#pragma once

#include <cstdint>
#include <random>

namespace sirloc {

// splitmix64 finalizer; decorrelates nearby keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (mix64(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Independent generator stream keyed by (master seed, up to three indices).
// Streams for distinct keys are statistically independent, so parallel
// trials can each own one without coordination.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t i0 = 0,
                                   std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
  std::uint64_t s = hash_combine(hash_combine(hash_combine(mix64(master), i0), i1), i2);
  return std::mt19937_64(s);
}

}  // namespace sirloc
