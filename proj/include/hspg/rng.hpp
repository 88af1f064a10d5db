#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hspg {

// All randomness in this project goes through mt19937_64 plus the mappings
// below. The engine and the mappings are fully specified, so equal seeds
// reproduce bit-identically on every platform (std::uniform_* distributions
// are implementation-defined and must not be used).

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent engine for (seed, stream), e.g. one per epoch.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform on [-1, 1).
inline double uniform_pm1(std::mt19937_64& eng) {
  return 2.0 * uniform_unit(eng) - 1.0;
}

// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t u;
  do {
    u = eng();
  } while (u >= limit);
  return u % bound;
}

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace hspg
