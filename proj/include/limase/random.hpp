#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace limase {

// Deterministic pseudorandom stream.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform and normal variates are derived here rather than through
// <random> distributions, whose algorithms are implementation-defined, so a
// given seed yields the same draws on every platform:
//   uniform  = top 53 bits / 2^53                      in [0, 1)
//   gaussian = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)       (Box-Muller, one
//              normal per two uniforms, no cached spare)
// A stream has a single owner. Parallel work derives child streams with
// derive_seed(parent_seed, index) before dispatch.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double gaussian();
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  RandomStream child(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer over (parent, index).
std::uint64_t derive_seed(std::uint64_t parent_seed, std::uint64_t index);

// n i.i.d. standard-normal draws. Two calls of n and m draws produce the same
// sequence as one call of n + m.
std::vector<double> draw_gaussian(RandomStream& rng, std::size_t n);

}  // namespace limase
