#pragma once

#include <cstdint>
#include <random>

namespace abcpass {

using Engine = std::mt19937_64;
using RandomSeed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-task seed stream: hash(base_seed, task_index). Tasks seeded
/// this way can run in any order or in parallel and still reproduce bit-exactly.
constexpr RandomSeed derive_seed(RandomSeed base, std::uint64_t task_index) {
  return splitmix64(splitmix64(base) ^ splitmix64(task_index + 0x6a09e667f3bcc909ULL));
}

inline Engine make_engine(RandomSeed seed) { return Engine{seed}; }

}  // namespace abcpass
