#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace radqec {

// Two-dimensional Sobol sequence in natural (radical-inverse) ordering with
// the standard direction numbers: dimension 0 is the van der Corput sequence,
// dimension 1 uses the degree-1 primitive polynomial x + 1, giving the
// initial integers m_j = 1, 3, 5, 15, 17, 51, ...
//
// The sequence is fully determined; there is no seed. Index 0 (the origin)
// is skipped: point(1) = (0.5, 0.5).
class Sobol2D {
 public:
  Sobol2D() {
    uint32_t m = 1;
    for (int j = 0; j < kBits; ++j) {
      v0_[j] = 1u << (31 - j);
      v1_[j] = m << (31 - j);
      m = (m << 1) ^ m;
    }
  }

  std::array<double, 2> point(uint64_t index) const {
    if (index == 0 || index >= (uint64_t(1) << kBits)) {
      throw std::out_of_range("Sobol2D: index must be in [1, 2^32)");
    }
    uint32_t x = 0, y = 0;
    for (int j = 0; j < kBits && (index >> j) != 0; ++j) {
      if ((index >> j) & 1u) {
        x ^= v0_[j];
        y ^= v1_[j];
      }
    }
    return {double(x) * 0x1.0p-32, double(y) * 0x1.0p-32};
  }

 private:
  static constexpr int kBits = 32;
  std::array<uint32_t, kBits> v0_{};
  std::array<uint32_t, kBits> v1_{};
};

} // namespace radqec
