#pragma once

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "radqec/coherence.hpp"
#include "radqec/decoder.hpp"
#include "radqec/noise_channels.hpp"
#include "radqec/records.hpp"
#include "radqec/rng.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

// Closed-form PTGAD probabilities without building the full channel.
inline PauliChannel ptgad(double t1_s, double t2_s, double t_gate_s) {
  if (t2_s > 2.0 * t1_s * (1.0 + 1e-12)) {
    throw std::invalid_argument("ptgad: non-physical pair, T2 > 2 T1");
  }
  const double gx = -std::expm1(-t_gate_s / t1_s);
  const double gz = -std::expm1(-t_gate_s / t2_s);
  PauliChannel p;
  p.p_x = gx / 4.0;
  p.p_y = gx / 4.0;
  p.p_z = std::max(gz / 2.0 - gx / 4.0, 0.0);
  p.p_i = 1.0 - p.p_x - p.p_y - p.p_z;
  p.validate();
  return p;
}

enum class Duration : int { kCx = 0, kH = 1, kReadout = 2 };

// Per-cycle, per-qubit cumulative Pauli samplers for the three gate
// durations. Built once per run and shared by all shots.
class NoiseTable {
 public:
  static NoiseTable build(const CoherenceSchedule& sched, const GateTimes& times) {
    NoiseTable t;
    t.n_qubits_ = sched.n_qubits();
    t.rows_.resize(sched.n_cycles() * sched.n_qubits());
    const double durs[3] = {times.cx_ns * 1e-9, times.h_ns * 1e-9,
                            times.readout_ns * 1e-9};
    for (std::size_t c = 0; c < sched.n_cycles(); ++c) {
      for (std::size_t q = 0; q < sched.n_qubits(); ++q) {
        const auto& coh = sched.at(c, q);
        auto& row = t.rows_[c * sched.n_qubits() + q];
        for (int d = 0; d < 3; ++d) {
          row[d] = PauliSampler::from(ptgad(coh.t1_s, coh.t2_s, durs[d]));
        }
      }
    }
    return t;
  }

  const PauliSampler& at(std::size_t cycle, int qubit, Duration d) const {
    return rows_[cycle * n_qubits_ + std::size_t(qubit)][int(d)];
  }
  std::size_t n_cycles() const { return n_qubits_ ? rows_.size() / n_qubits_ : 0; }

 private:
  std::size_t n_qubits_ = 0;
  std::vector<std::array<PauliSampler, 3>> rows_;
};

// A deterministically injected fault, applied after the given gate index of
// the given cycle (gate_index -1: before the cycle's first gate; cycle ==
// n_cycles with gate_index -1: just before the final data readout).
struct Injection {
  int cycle;
  int gate_index;
  int qubit;
  Pauli pauli;
};

struct SimOptions {
  bool noise = true;
  bool noisy_reset = false;
  bool idle_noise = false; // reserved sensitivity switch; not modeled per gate list
  std::vector<Injection> injections;
  int threads = 1;
};

namespace detail {

struct Frame {
  uint32_t x = 0, z = 0;

  void apply_pauli(Pauli p, int q) {
    if (p == Pauli::kX || p == Pauli::kY) x ^= 1u << q;
    if (p == Pauli::kZ || p == Pauli::kY) z ^= 1u << q;
  }
  void apply_h(int q) {
    const uint32_t xb = (x >> q) & 1u, zb = (z >> q) & 1u;
    if (xb != zb) {
      x ^= 1u << q;
      z ^= 1u << q;
    }
  }
  void apply_cx(int c, int t) {
    x ^= ((x >> c) & 1u) << t;
    z ^= ((z >> t) & 1u) << c;
  }
  void reset(int q) {
    x &= ~(1u << q);
    z &= ~(1u << q);
  }
};

inline Pauli sample_pauli(const PauliSampler& s, double u) {
  return static_cast<Pauli>(s.sample(u));
}

// One noisy stabilizer cycle on a Pauli frame. `cycle_rng` is the absolute
// cycle index used for both the noise table row and the RNG counter.
inline void run_frame_cycle(Frame& f, const StabilizerCircuit& circuit,
                            const NoiseTable& noise, std::size_t cycle_noise,
                            uint32_t cycle_rng, uint32_t shot,
                            const CounterRng& rng, const SimOptions& opt,
                            uint8_t& z_nibble, uint8_t& x_nibble) {
  z_nibble = 0;
  x_nibble = 0;
  for (const auto& inj : opt.injections) {
    if (inj.cycle == int(cycle_rng) && inj.gate_index < 0) {
      f.apply_pauli(inj.pauli, inj.qubit);
    }
  }
  for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
    const Gate& g = circuit.gates[gi];
    switch (g.type) {
      case GateType::kH:
        f.apply_h(g.q0);
        if (opt.noise) {
          const double u = rng.uniform(RngPurpose::kGateNoise, shot, cycle_rng,
                                       uint32_t(2 * gi));
          f.apply_pauli(sample_pauli(noise.at(cycle_noise, g.q0, Duration::kH), u), g.q0);
        }
        break;
      case GateType::kCX:
        f.apply_cx(g.q0, g.q1);
        if (opt.noise) {
          const double u0 = rng.uniform(RngPurpose::kGateNoise, shot, cycle_rng,
                                        uint32_t(2 * gi));
          const double u1 = rng.uniform(RngPurpose::kGateNoise, shot, cycle_rng,
                                        uint32_t(2 * gi + 1));
          f.apply_pauli(sample_pauli(noise.at(cycle_noise, g.q0, Duration::kCx), u0), g.q0);
          f.apply_pauli(sample_pauli(noise.at(cycle_noise, g.q1, Duration::kCx), u1), g.q1);
        }
        break;
      case GateType::kMeasure: {
        if (opt.noise) {
          const double u = rng.uniform(RngPurpose::kReadoutNoise, shot, cycle_rng,
                                       uint32_t(gi));
          f.apply_pauli(sample_pauli(noise.at(cycle_noise, g.q0, Duration::kReadout), u),
                        g.q0);
        }
        const uint32_t bit = (f.x >> g.q0) & 1u;
        if (g.q0 >= kFirstAncZ) {
          z_nibble |= uint8_t(bit << (g.q0 - kFirstAncZ));
        } else if (g.q0 >= kFirstAncX) {
          x_nibble |= uint8_t(bit << (g.q0 - kFirstAncX));
        }
        break;
      }
      case GateType::kReset:
        f.reset(g.q0);
        if (opt.noise && opt.noisy_reset) {
          const double u = rng.uniform(RngPurpose::kGateNoise, shot, cycle_rng,
                                       uint32_t(2 * gi));
          f.apply_pauli(
              sample_pauli(noise.at(cycle_noise, g.q0, Duration::kReadout), u), g.q0);
        }
        break;
    }
    for (const auto& inj : opt.injections) {
      if (inj.cycle == int(cycle_rng) && inj.gate_index == int(gi)) {
        f.apply_pauli(inj.pauli, inj.qubit);
      }
    }
  }
}

inline uint16_t frame_data_readout(Frame& f, const NoiseTable& noise,
                                   std::size_t cycle_noise, uint32_t cycle_rng,
                                   uint32_t shot, const CounterRng& rng,
                                   const SimOptions& opt) {
  for (const auto& inj : opt.injections) {
    if (inj.cycle == int(cycle_rng) + 1 && inj.gate_index < 0) {
      f.apply_pauli(inj.pauli, inj.qubit);
    }
  }
  uint16_t bits = 0;
  for (int q = 0; q < kNumData; ++q) {
    if (opt.noise) {
      const double u = rng.uniform(RngPurpose::kDataReadout, shot, cycle_rng,
                                   uint32_t(q));
      f.apply_pauli(sample_pauli(noise.at(cycle_noise, q, Duration::kReadout), u), q);
    }
    bits |= uint16_t((f.x >> q) & 1u) << q;
  }
  return bits;
}

template <typename Fn>
inline void parallel_shots(int shots, int threads, Fn&& fn) {
  if (threads <= 1 || shots < 2) {
    for (int s = 0; s < shots; ++s) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  const int n_threads = std::min(threads, shots);
  std::size_t chunk = std::size_t(shots + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int begin = int(t * chunk);
    const int end = std::min(shots, int((t + 1) * chunk));
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (int s = begin; s < end; ++s) fn(s);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace detail

// Protocol I: one contiguous state-chained run of n_cycles per shot, with a
// final Z-basis data readout. The records carry flip-representation
// syndromes; detectors come from syndrome_differences downstream.
inline std::vector<SyndromeRecord> run_protocol_I(const StabilizerCircuit& circuit,
                                                  const CoherenceSchedule& schedule,
                                                  int n_cycles, int shots,
                                                  const CounterRng& rng,
                                                  const SimOptions& opt = {}) {
  if (n_cycles < 1 || shots < 1) {
    throw std::invalid_argument("run_protocol_I: need n_cycles >= 1 and shots >= 1");
  }
  if (std::size_t(n_cycles) > schedule.n_cycles()) {
    throw std::invalid_argument("run_protocol_I: schedule shorter than n_cycles");
  }
  const NoiseTable noise = NoiseTable::build(schedule, circuit.times);

  std::vector<SyndromeRecord> records(shots);
  detail::parallel_shots(shots, opt.threads, [&](int s) {
    detail::Frame f;
    SyndromeRecord rec;
    rec.shot_id = uint32_t(s);
    rec.protocol = 1;
    rec.z_syndromes.resize(n_cycles);
    rec.x_syndromes.resize(n_cycles);
    for (int c = 0; c < n_cycles; ++c) {
      detail::run_frame_cycle(f, circuit, noise, std::size_t(c), uint32_t(c),
                              uint32_t(s), rng, opt, rec.z_syndromes[c],
                              rec.x_syndromes[c]);
    }
    rec.data_bits = detail::frame_data_readout(f, noise, std::size_t(n_cycles - 1),
                                               uint32_t(n_cycles - 1), uint32_t(s),
                                               rng, opt);
    records[s] = std::move(rec);
  });
  return records;
}

struct EpsilonEstimates {
  std::vector<double> eps;      // per-cycle logical error rate
  std::vector<int> failures;    // raw counts
  int shots = 0;
};

struct ProtocolIIOptions {
  bool include_data_layer = false; // single-round decode uses syndrome layer only
  SimOptions sim;
};

// Protocol II: each cycle i is simulated in isolation from the quiescent
// state; eps_i is the fraction of shots with a logical error after a
// single-round decode.
inline EpsilonEstimates run_protocol_II(const StabilizerCircuit& circuit,
                                        const CoherenceSchedule& schedule,
                                        const DetectorGraph& graph,
                                        int n_cycles, int shots,
                                        const CounterRng& rng,
                                        const ProtocolIIOptions& opt = {}) {
  if (n_cycles < 1 || shots < 1) {
    throw std::invalid_argument("run_protocol_II: need n_cycles >= 1 and shots >= 1");
  }
  if (std::size_t(n_cycles) > schedule.n_cycles()) {
    throw std::invalid_argument("run_protocol_II: schedule shorter than n_cycles");
  }
  const NoiseTable noise = NoiseTable::build(schedule, circuit.times);
  const auto hz = parity_matrices().hz;

  EpsilonEstimates est;
  est.eps.resize(n_cycles);
  est.failures.assign(n_cycles, 0);
  est.shots = shots;

  std::vector<std::vector<int>> fails(n_cycles, std::vector<int>());
  for (auto& v : fails) v.assign(shots, 0);

  detail::parallel_shots(shots, opt.sim.threads, [&](int s) {
    // Decorrelated from Protocol I by the shot-counter offset.
    const uint32_t shot_ctr = uint32_t(s) | (1u << 30);
    for (int c = 0; c < n_cycles; ++c) {
      detail::Frame f;
      uint8_t zn = 0, xn = 0;
      detail::run_frame_cycle(f, circuit, noise, std::size_t(c), uint32_t(c),
                              shot_ctr, rng, opt.sim, zn, xn);
      const uint16_t data = detail::frame_data_readout(
          f, noise, std::size_t(c), uint32_t(c), shot_ctr, rng, opt.sim);
      const auto shot_result = decode_z_record(graph, hz, {zn}, data,
                                               opt.include_data_layer);
      fails[c][s] = shot_result.verdict;
    }
  });
  for (int c = 0; c < n_cycles; ++c) {
    int sum = 0;
    for (int s = 0; s < shots; ++s) sum += fails[c][s];
    est.failures[c] = sum;
    est.eps[c] = double(sum) / shots;
  }
  return est;
}

} // namespace radqec
