#include "radcom/rng.hpp"

#include <cmath>

namespace radcom {

namespace {

constexpr uint32_t kMult0 = 0xD2511F53u;
constexpr uint32_t kMult1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void round_once(std::array<uint32_t, 4>& x, uint32_t k0, uint32_t k1) {
  const uint64_t p0 = static_cast<uint64_t>(kMult0) * x[0];
  const uint64_t p1 = static_cast<uint64_t>(kMult1) * x[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<uint32_t, 4> Philox::block(uint64_t ctr_hi, uint64_t ctr_lo) const {
  std::array<uint32_t, 4> x = {
      static_cast<uint32_t>(ctr_lo), static_cast<uint32_t>(ctr_lo >> 32),
      static_cast<uint32_t>(ctr_hi), static_cast<uint32_t>(ctr_hi >> 32)};
  uint32_t k0 = static_cast<uint32_t>(key_);
  uint32_t k1 = static_cast<uint32_t>(key_ >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(x, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

double Philox::uniform(uint64_t ctr_hi, uint64_t ctr_lo) const {
  const std::array<uint32_t, 4> b = block(ctr_hi, ctr_lo);
  const uint64_t bits =
      (static_cast<uint64_t>(b[0]) << 32 | b[1]) >> 11;  // top 53 bits
  return static_cast<double>(bits) * 0x1.0p-53;
}

Philox::NormalPair Philox::normal_pair(uint64_t ctr_hi, uint64_t ctr_lo) const {
  const std::array<uint32_t, 4> b = block(ctr_hi, ctr_lo);
  const uint64_t u_bits =
      (static_cast<uint64_t>(b[0]) << 32 | b[1]) >> 11;
  const uint64_t v_bits =
      (static_cast<uint64_t>(b[2]) << 32 | b[3]) >> 11;
  // u in (0, 1] so that log(u) is finite; v in [0, 1).
  const double u = (static_cast<double>(u_bits) + 1.0) * 0x1.0p-53;
  const double v = static_cast<double>(v_bits) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * 3.14159265358979323846 * v;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace radcom
