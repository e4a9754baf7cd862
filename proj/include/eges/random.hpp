#pragma once

#include <cstdint>
#include <random>

namespace eges {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream keyed by (seed, a, b), e.g. (seed, round, node).
inline Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(mix64(mix64(mix64(seed) ^ a) ^ b));
}

}  // namespace eges
