#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radqec/constants.hpp"
#include "radqec/rng.hpp"

namespace radqec {

// Quasiparticle recombination / decay rates in internal (um^-3, us) units:
// dn/dt = -recombination * n^2 - decay * n + g(t).
struct QpRates {
  double recombination = 25e-6; // per-density per-us
  double decay = 0.05;          // 1/us
};

struct TraceMetadata {
  double strike_mm_x = 0.0;
  double strike_mm_y = 0.0;
  double chip_mm = 10.0;
  double mitigation_um = 0.0;
  bool synthetic = false;
  std::string comment;
};

// Per-qubit quasiparticle generation g_qp(t) on a uniform time grid.
// Times are seconds; generation is um^-3 us^-1.
struct QpTrace {
  std::vector<double> time_s;
  std::vector<std::string> qubit_ids;
  std::vector<std::vector<double>> generation; // [qubit][sample]
  TraceMetadata meta;

  std::size_t samples() const { return time_s.size(); }
  std::size_t qubits() const { return qubit_ids.size(); }

  double step_s() const {
    if (time_s.size() < 2) throw std::invalid_argument("QpTrace: need >= 2 samples");
    return time_s[1] - time_s[0];
  }

  void validate() const {
    if (time_s.size() < 2) throw std::invalid_argument("QpTrace: need >= 2 samples");
    if (generation.size() != qubit_ids.size()) {
      throw std::invalid_argument("QpTrace: generation rows != qubit ids");
    }
    const double dt = time_s[1] - time_s[0];
    if (!(dt > 0)) throw std::invalid_argument("QpTrace: non-increasing grid");
    for (std::size_t i = 1; i < time_s.size(); ++i) {
      const double d = time_s[i] - time_s[i - 1];
      if (!(d > 0) || std::abs(d - dt) > 1e-9 * dt) {
        throw std::invalid_argument("QpTrace: grid not uniform at sample " +
                                    std::to_string(i));
      }
    }
    for (std::size_t q = 0; q < generation.size(); ++q) {
      if (generation[q].size() != time_s.size()) {
        throw std::invalid_argument("QpTrace: ragged generation row for qubit " +
                                    std::to_string(q));
      }
      for (std::size_t i = 0; i < generation[q].size(); ++i) {
        const double g = generation[q][i];
        if (!std::isfinite(g) || g < 0) {
          throw std::invalid_argument(
              "QpTrace: non-finite or negative generation, qubit " +
              std::to_string(q) + " at t = " + std::to_string(time_s[i]) + " s");
        }
      }
    }
  }
};

// Normalized quasiparticle density x_qp = n_qp / n_cp on the trace grid.
struct QpDensity {
  std::vector<double> time_s;
  std::vector<std::vector<double>> x_qp; // [qubit][sample]
  double n_cp_um3 = 0.0;
};

// Cooper-pair density n_cp = 2 g1(0) Delta with the free-electron single-spin
// density of states at the Fermi surface, g1 = sqrt(2 m^3 E_con) / (2 pi^2 hbar^3).
// Returns um^-3.
inline double compute_ncp(double gap_uev, double conduction_band_ev) {
  if (!(gap_uev > 0)) throw std::invalid_argument("compute_ncp: gap must be > 0");
  if (!(conduction_band_ev > 0)) {
    throw std::invalid_argument("compute_ncp: conduction band energy must be > 0");
  }
  const double gap_j = gap_uev * kMicroeVToJoule;
  const double econ_j = conduction_band_ev * kElectronVolt;
  const double m3 = kElectronMass * kElectronMass * kElectronMass;
  const double g1 = std::sqrt(2.0 * m3 * econ_j) /
                    (2.0 * kPi * kPi * kHbar * kHbar * kHbar); // 1/(J m^3)
  return 2.0 * g1 * gap_j * 1e-18; // m^-3 -> um^-3
}

struct IntegratorOptions {
  double abs_tol = 1e-12; // in x_qp units
  double rel_tol = 1e-9;
  std::optional<double> fixed_step_us; // disables adaptivity when set
};

namespace detail {

// Dormand-Prince 5(4) embedded pair.
struct Rk45Tableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order weights (via the FSAL 7th stage).
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                          e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                          e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

// One-qubit integration of dx/dt = -R x^2 - S x + G(t) over a uniform grid,
// G piecewise linear between grid points. Output sampled on the grid.
inline std::vector<double> integrate_normalized(
    const std::vector<double>& t_us, const std::vector<double>& g_norm,
    double big_r, double s, double x0, const IntegratorOptions& opt,
    int qubit_index) {
  using T = Rk45Tableau;
  const std::size_t n = t_us.size();
  std::vector<double> out(n);
  out[0] = x0;
  double x = x0;

  for (std::size_t seg = 0; seg + 1 < n; ++seg) {
    const double t0 = t_us[seg], t1 = t_us[seg + 1];
    const double g0 = g_norm[seg], g1v = g_norm[seg + 1];
    const double span = t1 - t0;
    const double gslope = (g1v - g0) / span;
    auto rhs = [&](double tau, double y) {
      const double g = g0 + gslope * tau; // tau relative to t0
      return -big_r * y * y - s * y + g;
    };

    double tau = 0.0;
    double h = opt.fixed_step_us ? std::min(*opt.fixed_step_us, span)
                                 : span;
    int rejects_in_row = 0;
    while (tau < span) {
      h = std::min(h, span - tau);
      const double k1 = rhs(tau, x);
      const double k2 = rhs(tau + T::c2 * h, x + h * (T::a21 * k1));
      const double k3 = rhs(tau + T::c3 * h, x + h * (T::a31 * k1 + T::a32 * k2));
      const double k4 =
          rhs(tau + T::c4 * h, x + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
      const double k5 =
          rhs(tau + T::c5 * h,
              x + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
      const double k6 =
          rhs(tau + h, x + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 +
                                T::a64 * k4 + T::a65 * k5));
      const double x5 =
          x + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
      const double k7 = rhs(tau + h, x5);
      const double x4 = x + h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 +
                                 T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

      if (opt.fixed_step_us) {
        x = x5;
        tau += h;
      } else {
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(x), std::abs(x5));
        const double err = std::abs(x5 - x4) / sc;
        if (err <= 1.0) {
          x = x5;
          tau += h;
          rejects_in_row = 0;
          const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
          h *= std::clamp(grow, 0.2, 5.0);
        } else {
          h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
          if (++rejects_in_row > 60) {
            throw std::runtime_error(
                "integrate_qp: step control failed for qubit " +
                std::to_string(qubit_index) + " near t = " +
                std::to_string((t0 + tau) * kUsToS) + " s");
          }
          continue;
        }
      }

      if (x < -1e-9) {
        throw std::runtime_error(
            "integrate_qp: negative density (instability) for qubit " +
            std::to_string(qubit_index) + " at t = " +
            std::to_string((t0 + tau) * kUsToS) + " s");
      }
      if (x < 0) x = 0.0;
    }
    out[seg + 1] = x;
  }
  return out;
}

} // namespace detail

// Integrate the recombination/decay ODE for every qubit of the trace and
// return the normalized density on the trace grid. `initial_um3` holds the
// per-qubit density at t = time_s[0]; empty means all zero.
inline QpDensity integrate_qp(const QpTrace& trace, const QpRates& rates,
                              double n_cp_um3,
                              const std::vector<double>& initial_um3 = {},
                              const IntegratorOptions& opt = {}) {
  trace.validate();
  if (!(n_cp_um3 > 0)) throw std::invalid_argument("integrate_qp: n_cp must be > 0");
  if (rates.recombination < 0 || rates.decay < 0) {
    throw std::invalid_argument("integrate_qp: rates must be >= 0");
  }
  if (!initial_um3.empty() && initial_um3.size() != trace.qubits()) {
    throw std::invalid_argument("integrate_qp: initial size != qubit count");
  }

  QpDensity out;
  out.time_s = trace.time_s;
  out.n_cp_um3 = n_cp_um3;
  out.x_qp.resize(trace.qubits());

  std::vector<double> t_us(trace.samples());
  for (std::size_t i = 0; i < t_us.size(); ++i) t_us[i] = trace.time_s[i] * kSToUs;

  const double big_r = rates.recombination * n_cp_um3; // 1/us on x
  std::vector<double> g_norm(trace.samples());
  for (std::size_t q = 0; q < trace.qubits(); ++q) {
    for (std::size_t i = 0; i < g_norm.size(); ++i) {
      g_norm[i] = trace.generation[q][i] / n_cp_um3;
    }
    const double x0 = initial_um3.empty() ? 0.0 : initial_um3[q] / n_cp_um3;
    out.x_qp[q] = detail::integrate_normalized(t_us, g_norm, big_r, rates.decay,
                                               x0, opt, int(q));
    for (double v : out.x_qp[q]) {
      if (!(v >= 0 && v < 1)) {
        throw std::runtime_error("integrate_qp: x_qp left [0, 1) for qubit " +
                                 std::to_string(q));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic trace generator. A documented, NON-physical stand-in for the
// upstream phonon-transport pipeline: per-qubit amplitude
//   A * exp(-dist/lambda) * exp(-eta * t_mit)
// with a fast-rise, double-exponential-fall temporal shape. Mitigation also
// shortens the attenuation length and the slow tail, with sub-linear
// (diminishing-returns) dependence on the film thickness.
struct SynthParams {
  double strike_mm_x = 1.7;
  double strike_mm_y = 1.7;
  double chip_mm = 10.0;
  double mitigation_um = 0.0;

  double amplitude = 1.1e4;  // um^-3 us^-1 at the strike point, unmitigated
  double lambda_mm = 18.0;   // unmitigated attenuation length
  double strike_time_us = 1.0;
  double rise_us = 0.5;
  double fall_fast_us = 7.0;
  double fall_slow_us = 60.0;
  double slow_fraction = 0.35;

  // Phenomenological mitigation response (exponent < 1 gives the thin-film
  // dominance / diminishing-returns behavior). Thin films cut the amplitude
  // steeply toward a residual floor; thickness beyond that mostly shrinks
  // the attenuation length and the phonon tail.
  double mitigation_exponent = 0.30;
  double amp_suppression = 4.0;   // amplitude factor exp(-k * m^p), saturating
  double amp_floor = 0.02;        // residual amplitude fraction as m -> inf
  double lambda_shrink = 6.0;     // lambda -> lambda / (1 + k * m^p)
  double tail_shrink = 5.0;       // fall times and slow fraction / (1 + k * m^p)

  double duration_us = 300.0;
  double step_us = 1.0;
  double jitter_frac = 0.0; // optional seeded per-qubit amplitude jitter
  uint64_t seed = 0;
};

// Positions are chip coordinates in mm, one entry per qubit, with ids.
inline QpTrace synthesize_trace(const std::vector<std::pair<double, double>>& positions_mm,
                                const std::vector<std::string>& qubit_ids,
                                const SynthParams& p) {
  if (positions_mm.size() != qubit_ids.size() || positions_mm.empty()) {
    throw std::invalid_argument("synthesize_trace: positions/ids mismatch");
  }
  if (p.strike_mm_x < 0 || p.strike_mm_x > p.chip_mm || p.strike_mm_y < 0 ||
      p.strike_mm_y > p.chip_mm) {
    throw std::invalid_argument("synthesize_trace: strike outside chip bounds");
  }
  if (p.mitigation_um < 0) {
    throw std::invalid_argument("synthesize_trace: mitigation must be >= 0");
  }

  const double mit = std::pow(p.mitigation_um, p.mitigation_exponent);
  const double amp_factor =
      p.amp_floor + (1.0 - p.amp_floor) * std::exp(-p.amp_suppression * mit);
  const double lambda = p.lambda_mm / (1.0 + p.lambda_shrink * mit);
  const double tail = 1.0 + p.tail_shrink * mit;
  const double fall_fast = p.fall_fast_us / tail;
  const double fall_slow = p.fall_slow_us / tail;
  const double slow_fraction = p.slow_fraction / tail;

  const std::size_t n = std::size_t(std::ceil(p.duration_us / p.step_us)) + 1;
  QpTrace trace;
  trace.qubit_ids = qubit_ids;
  trace.time_s.resize(n);
  for (std::size_t i = 0; i < n; ++i) trace.time_s[i] = i * p.step_us * kUsToS;
  trace.generation.assign(positions_mm.size(), std::vector<double>(n, 0.0));

  CounterRng rng(p.seed);
  for (std::size_t q = 0; q < positions_mm.size(); ++q) {
    const double dx = positions_mm[q].first - p.strike_mm_x;
    const double dy = positions_mm[q].second - p.strike_mm_y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    double amp = p.amplitude * amp_factor * std::exp(-dist / lambda);
    if (p.jitter_frac > 0) {
      const double u = rng.uniform(RngPurpose::kTraceJitter, uint32_t(q), 0, 0);
      amp *= 1.0 + p.jitter_frac * (2.0 * u - 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i * p.step_us - p.strike_time_us;
      if (t < 0) continue;
      const double rise = 1.0 - std::exp(-t / p.rise_us);
      const double fall = (1.0 - slow_fraction) * std::exp(-t / fall_fast) +
                          slow_fraction * std::exp(-t / fall_slow);
      trace.generation[q][i] = amp * rise * fall;
    }
  }

  trace.meta.strike_mm_x = p.strike_mm_x;
  trace.meta.strike_mm_y = p.strike_mm_y;
  trace.meta.chip_mm = p.chip_mm;
  trace.meta.mitigation_um = p.mitigation_um;
  trace.meta.synthetic = true;
  return trace;
}

} // namespace radqec
