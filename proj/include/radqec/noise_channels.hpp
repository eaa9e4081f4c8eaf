#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "radqec/constants.hpp"

namespace radqec {

// Stochastic Pauli channel probabilities.
struct PauliChannel {
  double p_i = 1.0, p_x = 0.0, p_y = 0.0, p_z = 0.0;

  void validate() const {
    for (double p : {p_i, p_x, p_y, p_z}) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("PauliChannel: probability outside [0, 1]");
      }
    }
    if (std::abs(p_i + p_x + p_y + p_z - 1.0) > 1e-15) {
      throw std::invalid_argument("PauliChannel: probabilities must sum to 1");
    }
  }
};

// Generalized amplitude damping channel for thermal relaxation and dephasing
// over a gate of duration t_gate. Choi matrix in the (input x output) basis
// |00>, |01>, |10>, |11>:
//   [ 1 - p1 gam   0         0          e^{-t/T2} ]
//   [ 0            p1 gam    0          0         ]
//   [ 0            0         p0 gam     0         ]
//   [ e^{-t/T2}    0         0          1 - p0 gam]
// with gam = 1 - e^{-t/T1}.
struct GadChannel {
  double t1_s, t2_s, t_gate_s, p0, p1;
  Eigen::Matrix4d choi;
  std::vector<Eigen::Matrix2cd> kraus;
};

inline GadChannel build_gad(double t1_s, double t2_s, double t_gate_s,
                            double p0 = 1.0, double p1 = 0.0) {
  if (!(t1_s > 0 && t2_s > 0 && t_gate_s > 0)) {
    throw std::invalid_argument("build_gad: times must be positive");
  }
  if (t2_s > 2.0 * t1_s * (1.0 + 1e-12)) {
    throw std::invalid_argument("build_gad: non-physical channel, T2 > 2 T1");
  }
  if (std::abs(p0 + p1 - 1.0) > 1e-12 || p0 < 0 || p1 < 0) {
    throw std::invalid_argument("build_gad: populations must satisfy p0 + p1 = 1");
  }

  GadChannel ch;
  ch.t1_s = t1_s;
  ch.t2_s = t2_s;
  ch.t_gate_s = t_gate_s;
  ch.p0 = p0;
  ch.p1 = p1;

  const double gam = 1.0 - std::exp(-t_gate_s / t1_s);
  const double coh = std::exp(-t_gate_s / t2_s);
  ch.choi.setZero();
  ch.choi(0, 0) = 1.0 - p1 * gam;
  ch.choi(1, 1) = p1 * gam;
  ch.choi(2, 2) = p0 * gam;
  ch.choi(3, 3) = 1.0 - p0 * gam;
  ch.choi(0, 3) = coh;
  ch.choi(3, 0) = coh;

  // Kraus operators from the Choi eigendecomposition; tiny negative
  // eigenvalues are numerical PSD noise and are clipped to zero.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(ch.choi);
  for (int k = 0; k < 4; ++k) {
    double lam = es.eigenvalues()(k);
    if (lam < -1e-14) {
      throw std::runtime_error("build_gad: Choi matrix not positive semidefinite");
    }
    if (lam <= 0.0) continue;
    const Eigen::Vector4d v = es.eigenvectors().col(k);
    Eigen::Matrix2cd kr;
    // Choi index (i, k) = i * 2 + k with i = input, k = output row of K.
    kr(0, 0) = std::sqrt(lam) * v(0);
    kr(1, 0) = std::sqrt(lam) * v(1);
    kr(0, 1) = std::sqrt(lam) * v(2);
    kr(1, 1) = std::sqrt(lam) * v(3);
    ch.kraus.push_back(kr);
  }
  return ch;
}

// Action of the channel on a density matrix, straight from the Choi blocks.
inline Eigen::Matrix2cd gad_apply_exact(const GadChannel& ch,
                                        const Eigen::Matrix2cd& rho) {
  const double gam = 1.0 - std::exp(-ch.t_gate_s / ch.t1_s);
  const double coh = std::exp(-ch.t_gate_s / ch.t2_s);
  Eigen::Matrix2cd out;
  out(0, 0) = rho(0, 0) * (1.0 - ch.p1 * gam) + rho(1, 1) * ch.p0 * gam;
  out(1, 1) = rho(0, 0) * ch.p1 * gam + rho(1, 1) * (1.0 - ch.p0 * gam);
  out(0, 1) = rho(0, 1) * coh;
  out(1, 0) = rho(1, 0) * coh;
  return out;
}

// Pauli twirl of the GAD channel (PTGAD). Closed forms:
//   P_X = P_Y = (1 - e^{-t/T1}) / 4
//   P_Z = (1 - e^{-t/T2}) / 2 - (1 - e^{-t/T1}) / 4
// Independent of p0 / p1.
inline PauliChannel pauli_twirl(const GadChannel& ch) {
  const double gx = -std::expm1(-ch.t_gate_s / ch.t1_s);
  const double gz = -std::expm1(-ch.t_gate_s / ch.t2_s);
  PauliChannel p;
  p.p_x = gx / 4.0;
  p.p_y = gx / 4.0;
  p.p_z = gz / 2.0 - gx / 4.0;
  if (p.p_z < 0) {
    if (p.p_z < -1e-15) {
      throw std::runtime_error("pauli_twirl: negative P_Z (T2 > 2 T1 slipped through)");
    }
    p.p_z = 0.0;
  }
  p.p_i = 1.0 - p.p_x - p.p_y - p.p_z;
  p.validate();
  return p;
}

// Convenience for the simulators: cumulative thresholds for sampling
// {X, Y, Z, I} from one uniform draw.
struct PauliSampler {
  double cx, cxy, cxyz; // cumulative P_X, +P_Y, +P_Z

  static PauliSampler from(const PauliChannel& p) {
    return {p.p_x, p.p_x + p.p_y, p.p_x + p.p_y + p.p_z};
  }
  // Returns 0 = I, 1 = X, 2 = Y, 3 = Z.
  int sample(double u) const {
    if (u < cx) return 1;
    if (u < cxy) return 2;
    if (u < cxyz) return 3;
    return 0;
  }
};

// Monte Carlo trajectory step: pick Kraus operator k with probability
// ||K_k psi||^2 restricted to `qubit`, apply it, renormalize. `u` is a
// uniform draw in [0, 1). Returns the selected index.
inline int apply_kraus(std::span<std::complex<double>> state, int n_qubits,
                       const GadChannel& ch, int qubit, double u) {
  if (qubit < 0 || qubit >= n_qubits) {
    throw std::out_of_range("apply_kraus: qubit index out of range");
  }
  const std::size_t dim = std::size_t(1) << n_qubits;
  if (state.size() != dim) throw std::invalid_argument("apply_kraus: bad state size");
  const std::size_t stride = std::size_t(1) << qubit;

  // Reduced density matrix of `qubit` (norms and cross term).
  double r00 = 0.0, r11 = 0.0;
  std::complex<double> r01 = 0.0;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::complex<double> a0 = state[base + off];
      const std::complex<double> a1 = state[base + off + stride];
      r00 += std::norm(a0);
      r11 += std::norm(a1);
      r01 += a0 * std::conj(a1);
    }
  }

  // Probabilities tr(K rho K^dagger) from the reduced matrix.
  int chosen = -1;
  double cum = 0.0, total = 0.0, prob = 0.0;
  std::vector<double> probs(ch.kraus.size());
  for (std::size_t k = 0; k < ch.kraus.size(); ++k) {
    const auto& kr = ch.kraus[k];
    const std::complex<double> m00 = kr(0, 0), m01 = kr(0, 1), m10 = kr(1, 0),
                               m11 = kr(1, 1);
    // tr(K rho K^+) with rho = [[r00, r01], [conj(r01), r11]].
    double pk = std::norm(m00) * r00 + std::norm(m01) * r11 +
                std::norm(m10) * r00 + std::norm(m11) * r11 +
                2.0 * std::real((std::conj(m00) * m01 + std::conj(m10) * m11) *
                                std::conj(r01));
    pk = std::max(pk, 0.0);
    probs[k] = pk;
    total += pk;
  }
  if (total < 1e-12) {
    throw std::runtime_error("apply_kraus: total Kraus probability underflow");
  }
  const double target = u * total;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    cum += probs[k];
    if (target < cum || k + 1 == probs.size()) {
      chosen = int(k);
      prob = probs[k];
      break;
    }
  }
  if (prob < 1e-300) {
    throw std::runtime_error("apply_kraus: selected Kraus weight underflow");
  }

  const auto& kr = ch.kraus[chosen];
  const double inv = 1.0 / std::sqrt(prob);
  const std::complex<double> m00 = kr(0, 0) * inv, m01 = kr(0, 1) * inv,
                             m10 = kr(1, 0) * inv, m11 = kr(1, 1) * inv;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::complex<double> a0 = state[base + off];
      const std::complex<double> a1 = state[base + off + stride];
      state[base + off] = m00 * a0 + m01 * a1;
      state[base + off + stride] = m10 * a0 + m11 * a1;
    }
  }
  return chosen;
}

} // namespace radqec
