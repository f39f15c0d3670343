#pragma once

#include <cstdint>
#include <random>

namespace r2l {

// splitmix64 finalizer. Used to derive independent per-frame / per-stage
// seeds from a base seed so that streams do not overlap.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t base, uint64_t stream) {
  return mix64(base + 0x632be59bd9b4e019ULL * (stream + 1));
}

inline std::mt19937_64 make_rng(uint64_t base, uint64_t stream) {
  return std::mt19937_64(mix_seed(base, stream));
}

}  // namespace r2l
