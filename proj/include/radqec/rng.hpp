#pragma once

#include <array>
#include <cstdint>

namespace radqec {

// Philox-4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so shot- and gate-level substreams never overlap and the
// results are independent of thread scheduling.
namespace philox {

inline constexpr uint32_t kMul0 = 0xD2511F53u;
inline constexpr uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                     std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const uint64_t p0 = uint64_t(kMul0) * ctr[0];
    const uint64_t p1 = uint64_t(kMul1) * ctr[2];
    ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
           uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
  }
  return ctr;
}

} // namespace philox

// Purpose tags keep unrelated uses of the same (shot, cycle, slot) counter on
// disjoint substreams.
enum class RngPurpose : uint32_t {
  kGateNoise = 1,
  kReadoutNoise = 2,
  kDataReadout = 3,
  kKrausSelect = 4,
  kMeasureCollapse = 5,
  kTraceJitter = 6,
  kGeneric = 7,
};

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  // 64 uniform bits for the given counter tuple.
  uint64_t bits(RngPurpose purpose, uint32_t shot, uint32_t cycle,
                uint32_t slot, uint32_t draw = 0) const {
    const std::array<uint32_t, 2> key{uint32_t(seed_), uint32_t(seed_ >> 32)};
    const std::array<uint32_t, 4> ctr{
        shot, cycle, slot, (uint32_t(purpose) << 27) | (draw & 0x07FFFFFFu)};
    const auto out = philox::block(ctr, key);
    return (uint64_t(out[0]) << 32) | out[1];
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(RngPurpose purpose, uint32_t shot, uint32_t cycle,
                 uint32_t slot, uint32_t draw = 0) const {
    return double(bits(purpose, shot, cycle, slot, draw) >> 11) * 0x1.0p-53;
  }

 private:
  uint64_t seed_;
};

} // namespace radqec
