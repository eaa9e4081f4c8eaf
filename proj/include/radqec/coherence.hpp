#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "radqec/constants.hpp"
#include "radqec/lambert.hpp"
#include "radqec/qp_dynamics.hpp"

namespace radqec {

struct TransmonParams {
  double omega01_rad_s = 2.0 * kPi * 5.000e9;
  double ec_hz = 0.400e9;  // E_C / h
  double ej_hz = 9.234e9;  // E_J / h
  double gap_al_uev = 191.0;
  double t1_base_s = 100e-6;
  double t2_base_s = 200e-6;
  double gamma_phi_base = 0.0; // 1/s

  void validate() const {
    if (!(omega01_rad_s > 0 && ec_hz > 0 && ej_hz > 0 && gap_al_uev > 0 &&
          t1_base_s > 0 && t2_base_s > 0 && gamma_phi_base >= 0)) {
      throw std::invalid_argument("TransmonParams: all parameters must be positive");
    }
    if (t2_base_s > 2.0 * t1_base_s * (1.0 + 1e-12)) {
      throw std::invalid_argument("TransmonParams: T2_base must be <= 2 T1_base");
    }
  }
  double ej_over_ec() const { return ej_hz / ec_hz; }
};

// Equilibrium relation x_qp(T) = sqrt(2 pi kB T / Delta) exp(-Delta / kB T).
inline double x_qp_equilibrium(double t_kelvin, double gap_uev) {
  if (!(t_kelvin > 0)) throw std::domain_error("x_qp_equilibrium: T must be > 0");
  const double gap_j = gap_uev * kMicroeVToJoule;
  const double kt = kBoltzmann * t_kelvin;
  return std::sqrt(2.0 * kPi * kt / gap_j) * std::exp(-gap_j / kt);
}

// Effective quasi-equilibrium temperature T_eff = 2 Delta / (kB W0(4 pi / x^2)).
// Exact inverse of x_qp_equilibrium.
inline double effective_temperature(double x_qp, double gap_uev) {
  if (!(x_qp > 0)) throw std::domain_error("effective_temperature: x_qp must be > 0");
  if (!(x_qp < 1)) throw std::domain_error("effective_temperature: x_qp must be < 1");
  const double gap_j = gap_uev * kMicroeVToJoule;
  const double log_arg = std::log(4.0 * kPi) - 2.0 * std::log(x_qp);
  const double w = (log_arg > 34.5) ? detail::lambert_w0_from_log(log_arg)
                                    : lambert_w0(4.0 * kPi / (x_qp * x_qp));
  return 2.0 * gap_j / (kBoltzmann * w);
}

// Quasiparticle-induced relaxation: dGamma1 = (x/pi) sqrt(2 w01 Delta / hbar).
// Exactly linear in x_qp.
inline double delta_gamma1(double x_qp, const TransmonParams& p) {
  if (x_qp < 0) throw std::domain_error("delta_gamma1: x_qp must be >= 0");
  const double gap_j = p.gap_al_uev * kMicroeVToJoule;
  const double rate = std::sqrt(2.0 * p.omega01_rad_s * gap_j / kHbar);
  return (x_qp / kPi) * rate;
}

// Quasiparticle-induced pure dephasing:
//   dGamma_phi = (E_C / hbar) x^2 / (2 pi^2) e^{W0(4 pi / x^2) / 2}.
// Evaluated through the overflow-free identity
//   x^2 e^{u/2} = (4 pi / u) e^{-u/2},  u = W0(4 pi / x^2),
// which is valid for every x > 0 down to denormals. E_C enters as the
// angular rate E_C / hbar.
inline double delta_gamma_phi(double x_qp, const TransmonParams& p) {
  if (x_qp < 0) throw std::domain_error("delta_gamma_phi: x_qp must be >= 0");
  if (x_qp == 0) return 0.0;
  const double ec_rad_s = 2.0 * kPi * p.ec_hz; // E_C / hbar
  const double log_arg = std::log(4.0 * kPi) - 2.0 * std::log(x_qp);
  const double u = (log_arg > 34.5) ? detail::lambert_w0_from_log(log_arg)
                                    : lambert_w0(4.0 * kPi / (x_qp * x_qp));
  return ec_rad_s * 2.0 * std::exp(-0.5 * u) / (kPi * u);
}

struct Coherence {
  double t1_s;
  double t2_s;
};

// Per-qubit, per-cycle (T1, T2) derived from x_qp under the quasi-equilibrium
// approximation. Immutable after construction.
struct CoherenceSchedule {
  double cycle_s = 1e-6;
  std::vector<std::vector<Coherence>> cycles; // [cycle][qubit]

  std::size_t n_cycles() const { return cycles.size(); }
  std::size_t n_qubits() const { return cycles.empty() ? 0 : cycles[0].size(); }
  const Coherence& at(std::size_t cycle, std::size_t qubit) const {
    return cycles[cycle][qubit];
  }
};

enum class CycleSampling { kCycleStart, kCycleAverage };

struct ScheduleOptions {
  CycleSampling sampling = CycleSampling::kCycleStart;
  bool allow_resample = true; // linear interpolation off the density grid
};

namespace detail {

inline double interp_x(const QpDensity& d, std::size_t qubit, double t_s) {
  const auto& ts = d.time_s;
  if (t_s <= ts.front()) return d.x_qp[qubit].front();
  if (t_s >= ts.back()) return d.x_qp[qubit].back();
  const double step = ts[1] - ts[0];
  const std::size_t i = std::min(std::size_t((t_s - ts.front()) / step),
                                 ts.size() - 2);
  const double w = (t_s - ts[i]) / (ts[i + 1] - ts[i]);
  return (1.0 - w) * d.x_qp[qubit][i] + w * d.x_qp[qubit][i + 1];
}

} // namespace detail

inline Coherence coherence_from_x(double x_qp, const TransmonParams& p) {
  const double g1 = 1.0 / p.t1_base_s + delta_gamma1(x_qp, p);
  const double t1 = 1.0 / g1;
  const double g2 = 1.0 / (2.0 * t1) + delta_gamma_phi(x_qp, p) + p.gamma_phi_base;
  return {t1, 1.0 / g2};
}

// Builds the schedule over floor(duration / cycle) cycles. x_qp is read at
// the cycle start instant by default; cycle averaging is available as an
// option. If the cycle time is not an integer multiple of the density grid
// step, resampling must be enabled or the call is rejected.
inline CoherenceSchedule build_schedule(const QpDensity& density,
                                        const std::vector<TransmonParams>& params,
                                        double cycle_s,
                                        const ScheduleOptions& opt = {}) {
  if (density.x_qp.empty() || density.time_s.size() < 2) {
    throw std::invalid_argument("build_schedule: empty density");
  }
  if (params.size() != density.x_qp.size()) {
    throw std::invalid_argument("build_schedule: params size != qubit count");
  }
  for (const auto& p : params) p.validate();
  if (!(cycle_s > 0)) throw std::invalid_argument("build_schedule: cycle must be > 0");

  const double grid_step = density.time_s[1] - density.time_s[0];
  const double ratio = cycle_s / grid_step;
  const bool commensurate = std::abs(ratio - std::round(ratio)) < 1e-9 * ratio;
  if (!commensurate && !opt.allow_resample) {
    throw std::invalid_argument(
        "build_schedule: cycle is not a multiple of the density grid step and "
        "resampling is disabled");
  }

  const double duration = density.time_s.back() - density.time_s.front();
  const std::size_t n_cycles = std::size_t(std::floor(duration / cycle_s + 1e-9));
  if (n_cycles == 0) throw std::invalid_argument("build_schedule: density shorter than one cycle");

  CoherenceSchedule sched;
  sched.cycle_s = cycle_s;
  sched.cycles.assign(n_cycles, std::vector<Coherence>(params.size()));
  for (std::size_t c = 0; c < n_cycles; ++c) {
    const double t0 = density.time_s.front() + double(c) * cycle_s;
    for (std::size_t q = 0; q < params.size(); ++q) {
      double x;
      if (opt.sampling == CycleSampling::kCycleStart) {
        x = detail::interp_x(density, q, t0);
      } else {
        // Trapezoid average of x over the cycle on a fine sub-grid.
        const int sub = 8;
        double acc = 0.0;
        for (int k = 0; k <= sub; ++k) {
          const double w = (k == 0 || k == sub) ? 0.5 : 1.0;
          acc += w * detail::interp_x(density, q, t0 + cycle_s * k / sub);
        }
        x = acc / sub;
      }
      sched.cycles[c][q] = coherence_from_x(x, params[q]);
    }
  }
  return sched;
}

// Flat schedule at baseline coherence (no quasiparticles); used for the
// non-radiated reference runs.
inline CoherenceSchedule baseline_schedule(const TransmonParams& p,
                                           std::size_t n_qubits,
                                           std::size_t n_cycles, double cycle_s) {
  p.validate();
  const Coherence base = coherence_from_x(0.0, p);
  CoherenceSchedule sched;
  sched.cycle_s = cycle_s;
  sched.cycles.assign(n_cycles, std::vector<Coherence>(n_qubits, base));
  return sched;
}

// Columnar export: cycle, qubit, T1_s, T2_s.
inline void write_schedule_csv(const CoherenceSchedule& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_schedule_csv: cannot open " + path);
  out << "cycle,qubit,t1_s,t2_s\n";
  char buf[96];
  for (std::size_t c = 0; c < s.n_cycles(); ++c) {
    for (std::size_t q = 0; q < s.n_qubits(); ++q) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", c, q,
                    s.cycles[c][q].t1_s, s.cycles[c][q].t2_s);
      out << buf;
    }
  }
}

} // namespace radqec
