#pragma once

#include <cstdint>
#include <random>

namespace scanpath {

using Rng = std::mt19937_64;

// splitmix64 finalizer
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for (seed, index). Batch item i always sees the
/// same stream regardless of which worker runs it.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
  return Rng(stream_seed(seed, index));
}

}  // namespace scanpath
