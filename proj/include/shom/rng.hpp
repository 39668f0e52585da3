#pragma once

#include <cstdint>
#include <random>

namespace shom {

using Engine = std::mt19937_64;

/// Identical (master_seed, stream_index) pairs reproduce identical samples.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Engine for one sub-stream (chunk, bin, ...) of a seeded stream.
inline Engine make_engine(const RngSeed& seed, std::uint64_t substream) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed.master_seed),  hi(seed.master_seed),
                    lo(seed.stream_index), hi(seed.stream_index),
                    lo(substream),         hi(substream)};
  return Engine(seq);
}

/// Seed for the i-th child of `parent` (e.g. one trial of a study). Children of
/// different parents land on different master seeds.
inline RngSeed derive_seed(const RngSeed& parent, std::uint64_t child) {
  // splitmix64 finalizer over the parent pair
  std::uint64_t z = parent.master_seed + 0x9e3779b97f4a7c15ULL * (parent.stream_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return {z, child};
}

}  // namespace shom
