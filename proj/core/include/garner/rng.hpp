#pragma once

#include <cstdint>
#include <random>

#include "garner/types.hpp"

namespace garner {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d4ecda82f48d6dULL;
  return x ^ (x >> 31);
}

// Deterministic per-purpose seed derivation. Distinct (seed, stream, step)
// triples give statistically independent generator states, so adding a new
// consumer never perturbs existing streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t step = 0) {
  return mix64(mix64(seed ^ mix64(stream)) ^ step);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t step = 0) {
  return std::mt19937_64(derive_seed(seed, stream, step));
}

// Stream ids for the named stages of the pipeline. Values are arbitrary
// but frozen: changing one changes every artifact downstream of it.
namespace streams {
inline constexpr std::uint64_t kSynthetic = 0x53594e5448ULL;
inline constexpr std::uint64_t kParamInit = 0x504152414dULL;
inline constexpr std::uint64_t kNegativeGraph = 0x4e454747ULL;
inline constexpr std::uint64_t kSubsample = 0x53554253ULL;
inline constexpr std::uint64_t kShuffle = 0x53485546ULL;
inline constexpr std::uint64_t kSplit = 0x53504c49ULL;
}  // namespace streams

}  // namespace garner
