#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "radqec/noise_channels.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

// Dense statevector simulator, capacity-capped at 20 qubits (16 MB of
// complex doubles). Norm is tracked and restored after channel/measurement
// steps; invariants keep it within 1e-10 of unity.
class StateVector {
 public:
  static constexpr int kMaxQubits = 20;

  explicit StateVector(int n_qubits) : n_(n_qubits) {
    if (n_ < 1 || n_ > kMaxQubits) {
      throw std::invalid_argument("StateVector: qubit count exceeds capacity (20)");
    }
    amp_.assign(std::size_t(1) << n_, {0.0, 0.0});
    amp_[0] = 1.0;
  }

  int n_qubits() const { return n_; }
  std::span<std::complex<double>> amplitudes() { return amp_; }

  void set_zero_state() {
    std::fill(amp_.begin(), amp_.end(), std::complex<double>(0.0, 0.0));
    amp_[0] = 1.0;
  }

  void apply_h(int q) {
    check(q);
    const std::size_t stride = std::size_t(1) << q;
    const double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t base = 0; base < amp_.size(); base += 2 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const auto a0 = amp_[base + off];
        const auto a1 = amp_[base + off + stride];
        amp_[base + off] = inv * (a0 + a1);
        amp_[base + off + stride] = inv * (a0 - a1);
      }
    }
  }

  void apply_cx(int control, int target) {
    check(control);
    check(target);
    if (control == target) throw std::invalid_argument("apply_cx: equal qubits");
    const std::size_t cbit = std::size_t(1) << control;
    const std::size_t tbit = std::size_t(1) << target;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if ((i & cbit) && !(i & tbit)) std::swap(amp_[i], amp_[i | tbit]);
    }
  }

  void apply_pauli(Pauli p, int q) {
    check(q);
    if (p == Pauli::kI) return;
    const std::size_t bit = std::size_t(1) << q;
    const std::complex<double> im(0.0, 1.0);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      switch (p) {
        case Pauli::kX:
          if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
          break;
        case Pauli::kY:
          if (!(i & bit)) {
            const auto a0 = amp_[i];
            amp_[i] = -im * amp_[i | bit];
            amp_[i | bit] = im * a0;
          }
          break;
        case Pauli::kZ:
          if (i & bit) amp_[i] = -amp_[i];
          break;
        default:
          break;
      }
    }
  }

  double prob_one(int q) const {
    check(q);
    const std::size_t bit = std::size_t(1) << q;
    double p = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & bit) p += std::norm(amp_[i]);
    }
    return p;
  }

  // Projective Z measurement with collapse; outcome 1 iff u < P(1).
  int measure(int q, double u) {
    const double p1 = prob_one(q);
    const int outcome = (u < p1) ? 1 : 0;
    const std::size_t bit = std::size_t(1) << q;
    const double keep = outcome ? p1 : 1.0 - p1;
    if (keep <= 0.0) throw std::runtime_error("StateVector: measured zero-probability branch");
    const double inv = 1.0 / std::sqrt(keep);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      const bool one = (i & bit) != 0;
      amp_[i] = (one == (outcome == 1)) ? amp_[i] * inv
                                        : std::complex<double>(0.0, 0.0);
    }
    return outcome;
  }

  // Measure-and-flip reset to |0>.
  void reset(int q, double u) {
    if (measure(q, u) == 1) apply_pauli(Pauli::kX, q);
  }

  int apply_gad(const GadChannel& ch, int q, double u) {
    return apply_kraus(amp_, n_, ch, q, u);
  }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  void renormalize() {
    const double nrm = norm();
    if (nrm < 1e-12) throw std::runtime_error("StateVector: norm underflow");
    const double inv = 1.0 / nrm;
    for (auto& a : amp_) a *= inv;
  }

 private:
  void check(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("StateVector: qubit out of range");
  }

  int n_;
  std::vector<std::complex<double>> amp_;
};

} // namespace radqec
