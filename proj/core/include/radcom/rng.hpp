#pragma once

// Counter-based pseudo-random numbers (Philox-4x32-10).
//
// A (key, counter) pair is mapped to 128 output bits through ten rounds of
// 32x32->64 multiply/xor mixing. Because draws are pure functions of the
// counter, substreams can be assigned per (trial, pair, element) and evaluated
// in any order -- or concurrently -- with bit-identical results. That is what
// makes Monte-Carlo sweeps reproducible independent of the thread count.

#include <array>
#include <cstdint>

namespace radcom {

class Philox {
 public:
  explicit Philox(uint64_t key) : key_(key) {}

  // Raw 128-bit block for a 128-bit counter split into two 64-bit halves.
  std::array<uint32_t, 4> block(uint64_t ctr_hi, uint64_t ctr_lo) const;

  // Uniform double in [0, 1) using the top 53 bits of the first output half.
  double uniform(uint64_t ctr_hi, uint64_t ctr_lo) const;

  // Pair of independent standard normals (Box-Muller over one block).
  struct NormalPair {
    double z0;
    double z1;
  };
  NormalPair normal_pair(uint64_t ctr_hi, uint64_t ctr_lo) const;

  uint64_t key() const { return key_; }

 private:
  uint64_t key_;
};

}  // namespace radcom
