#pragma once

// Test-side oracles, kept independent of the library's closed-form paths.

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "radqec/noise_channels.hpp"

namespace test_helpers {

inline const std::array<Eigen::Matrix2cd, 4>& paulis() {
  static const std::array<Eigen::Matrix2cd, 4> p = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    const std::complex<double> i(0, 1);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -i, i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return p;
}

// Channel action via the Kraus list.
inline Eigen::Matrix2cd apply_channel(const radqec::GadChannel& ch,
                                      const Eigen::Matrix2cd& rho) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& k : ch.kraus) out += k * rho * k.adjoint();
  return out;
}

// Twirl the channel numerically: average P^dag E(P rho P^dag) P over the
// Pauli group, then read the Pauli probabilities off the PTM diagonal via
// the Walsh-Hadamard relation.
inline radqec::PauliChannel numerical_twirl(const radqec::GadChannel& ch) {
  const auto& P = paulis();
  std::array<double, 4> diag{};
  for (int a = 0; a < 4; ++a) {
    // PTM diagonal of the twirled channel:
    // d_a = (1/4) sum_p tr(P_a P_p E(P_p P_a P_p) P_p) / 2.
    std::complex<double> acc = 0.0;
    for (int p = 0; p < 4; ++p) {
      const Eigen::Matrix2cd inner = apply_channel(ch, P[p] * P[a] * P[p]);
      acc += (P[a] * P[p] * inner * P[p]).trace();
    }
    diag[a] = 0.125 * acc.real(); // (1/4 twirl) * (1/2 trace norm)
  }
  radqec::PauliChannel out;
  out.p_i = 0.25 * (diag[0] + diag[1] + diag[2] + diag[3]);
  out.p_x = 0.25 * (diag[0] + diag[1] - diag[2] - diag[3]);
  out.p_y = 0.25 * (diag[0] - diag[1] + diag[2] - diag[3]);
  out.p_z = 0.25 * (diag[0] - diag[1] - diag[2] + diag[3]);
  return out;
}

// || sum_k vec(K_k) vec(K_k)^dag - Choi ||_max
inline double choi_reconstruction_error(const radqec::GadChannel& ch) {
  Eigen::Matrix4cd rebuilt = Eigen::Matrix4cd::Zero();
  for (const auto& k : ch.kraus) {
    Eigen::Vector4cd v;
    v << k(0, 0), k(1, 0), k(0, 1), k(1, 1);
    rebuilt += v * v.adjoint();
  }
  return (rebuilt - ch.choi.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
}

// || sum_k K^dag K - I ||_max
inline double kraus_completeness_error(const radqec::GadChannel& ch) {
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  for (const auto& k : ch.kraus) acc += k.adjoint() * k;
  return (acc - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

} // namespace test_helpers
