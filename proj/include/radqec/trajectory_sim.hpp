#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "radqec/coherence.hpp"
#include "radqec/pauli_sim.hpp"
#include "radqec/records.hpp"
#include "radqec/rng.hpp"
#include "radqec/statevector.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

struct TrajectoryOptions {
  double p0 = 1.0;
  double p1 = 0.0;
  bool noise = true;
  // Reuse one simulation ancilla across the eight stabilizer blocks (a
  // 10-qubit register instead of 17). The measurement blocks of commuting
  // stabilizers commute, so the sampled distribution is unchanged while the
  // state shrinks by 2^7.
  bool multiplex_ancilla = true;
  std::vector<Injection> injections;
  int threads = 1;
};

namespace detail {

// Exact GAD channels per (T1, T2, duration), memoized and prefilled so the
// table is read-only while shots run in parallel.
class GadTable {
 public:
  GadTable(const CoherenceSchedule& sched, const GateTimes& times, double p0,
           double p1, std::size_t n_cycles)
      : sched_(&sched) {
    const double durs[3] = {times.cx_ns * 1e-9, times.h_ns * 1e-9,
                            times.readout_ns * 1e-9};
    for (std::size_t c = 0; c < n_cycles; ++c) {
      for (std::size_t q = 0; q < sched.n_qubits(); ++q) {
        const auto& coh = sched.at(c, q);
        for (int d = 0; d < 3; ++d) {
          const Key key{coh.t1_s, coh.t2_s, d};
          if (!cache_.count(key)) {
            cache_.emplace(key, build_gad(coh.t1_s, coh.t2_s, durs[d], p0, p1));
          }
        }
      }
    }
  }

  const GadChannel& at(std::size_t cycle, int qubit, Duration d) const {
    const auto& coh = sched_->at(cycle, std::size_t(qubit));
    return cache_.at(Key{coh.t1_s, coh.t2_s, int(d)});
  }

 private:
  struct Key {
    double t1, t2;
    int d;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      uint64_t h = fnv1a(&k.t1, sizeof(double));
      h = fnv1a(&k.t2, sizeof(double), h);
      h = fnv1a(&k.d, sizeof(int), h);
      return std::size_t(h);
    }
  };
  const CoherenceSchedule* sched_;
  std::unordered_map<Key, GadChannel, KeyHash> cache_;
};

// Runs the circuit's gates for one cycle on a statevector. In multiplexed
// mode `anc_map` sends every real ancilla index to the shared register slot;
// gates are then grouped per ancilla block (the construction order of the
// gate list already keeps each ancilla's gates contiguous per block run).
struct TrajectoryEngine {
  StateVector* sv;
  const GadTable* gad;
  const CounterRng* rng;
  const TrajectoryOptions* opt;
  uint32_t shot;
  bool reference_round = false; // reference round runs noise-free

  static constexpr uint32_t kReferenceCycle = 0x7FFFFFFFu;

  int reg_of(int qubit, int shared_slot) const {
    return (qubit < kFirstAncX || shared_slot < 0) ? qubit : shared_slot;
  }

  void run_gate(const Gate& g, std::size_t gi, std::size_t cycle_noise,
                uint32_t cycle_rng, int shared_slot, uint8_t& z_nibble,
                uint8_t& x_nibble) {
    const bool noisy = !reference_round && opt->noise;
    switch (g.type) {
      case GateType::kH: {
        const int reg = reg_of(g.q0, shared_slot);
        sv->apply_h(reg);
        if (noisy) {
          const double u =
              rng->uniform(RngPurpose::kKrausSelect, shot, cycle_rng, uint32_t(2 * gi));
          sv->apply_gad(gad->at(cycle_noise, g.q0, Duration::kH), reg, u);
        }
        break;
      }
      case GateType::kCX: {
        const int rc = reg_of(g.q0, shared_slot);
        const int rt = reg_of(g.q1, shared_slot);
        sv->apply_cx(rc, rt);
        if (noisy) {
          const double u0 =
              rng->uniform(RngPurpose::kKrausSelect, shot, cycle_rng, uint32_t(2 * gi));
          const double u1 = rng->uniform(RngPurpose::kKrausSelect, shot, cycle_rng,
                                         uint32_t(2 * gi + 1));
          sv->apply_gad(gad->at(cycle_noise, g.q0, Duration::kCx), rc, u0);
          sv->apply_gad(gad->at(cycle_noise, g.q1, Duration::kCx), rt, u1);
        }
        break;
      }
      case GateType::kMeasure: {
        const int reg = reg_of(g.q0, shared_slot);
        if (noisy) {
          const double u =
              rng->uniform(RngPurpose::kReadoutNoise, shot, cycle_rng, uint32_t(gi));
          sv->apply_gad(gad->at(cycle_noise, g.q0, Duration::kReadout), reg, u);
        }
        const double uc =
            rng->uniform(RngPurpose::kMeasureCollapse, shot, cycle_rng, uint32_t(gi));
        const uint32_t bit = uint32_t(sv->measure(reg, uc));
        if (g.q0 >= kFirstAncZ) {
          z_nibble |= uint8_t(bit << (g.q0 - kFirstAncZ));
        } else {
          x_nibble |= uint8_t(bit << (g.q0 - kFirstAncX));
        }
        break;
      }
      case GateType::kReset: {
        const int reg = reg_of(g.q0, shared_slot);
        const double uc = rng->uniform(RngPurpose::kMeasureCollapse, shot, cycle_rng,
                                       uint32_t(gi) | (1u << 20));
        sv->reset(reg, uc);
        break;
      }
    }
    if (!reference_round) {
      for (const auto& inj : opt->injections) {
        if (inj.cycle == int(cycle_rng) && inj.gate_index == int(gi)) {
          sv->apply_pauli(inj.pauli, reg_of(inj.qubit, shared_slot));
        }
      }
    }
  }
};

// Gate indices grouped per ancilla, in gate-list order.
inline std::array<std::vector<std::size_t>, 8> ancilla_blocks(
    const StabilizerCircuit& circuit) {
  std::array<std::vector<std::size_t>, 8> blocks;
  for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
    const Gate& g = circuit.gates[gi];
    const int anc = (g.q0 >= kFirstAncX) ? g.q0 : g.q1;
    if (anc < kFirstAncX) throw std::logic_error("ancilla_blocks: gate without ancilla");
    blocks[anc - kFirstAncX].push_back(gi);
  }
  return blocks;
}

} // namespace detail

// Protocol I on the exact GAD channel: a noise-free preparation round fixes
// the quiescent reference, then n_cycles noisy rounds with the state carried
// across cycles, then the Z-basis data readout. Syndromes are stored as
// flips against the shot's own reference.
inline std::vector<SyndromeRecord> run_gad_protocol_I(
    const StabilizerCircuit& circuit, const CoherenceSchedule& schedule,
    int n_cycles, int shots, const CounterRng& rng,
    const TrajectoryOptions& opt = {}) {
  if (n_cycles < 1 || shots < 1) {
    throw std::invalid_argument("run_gad_protocol_I: need n_cycles/shots >= 1");
  }
  if (std::size_t(n_cycles) > schedule.n_cycles()) {
    throw std::invalid_argument("run_gad_protocol_I: schedule shorter than n_cycles");
  }
  const int n_reg = opt.multiplex_ancilla ? kNumData + 1 : kNumQubits;
  if (n_reg > StateVector::kMaxQubits) {
    throw std::invalid_argument("run_gad_protocol_I: register exceeds capacity");
  }
  const auto blocks = detail::ancilla_blocks(circuit);
  const detail::GadTable gad(schedule, circuit.times, opt.p0, opt.p1,
                             std::size_t(n_cycles));

  std::vector<SyndromeRecord> records(shots);
  detail::parallel_shots(shots, opt.threads, [&](int s) {
    StateVector sv(n_reg);
    detail::TrajectoryEngine eng{&sv, &gad, &rng, &opt, uint32_t(s), false};

    auto run_cycle = [&](std::size_t cycle_noise, uint32_t cycle_rng, uint8_t& zn,
                         uint8_t& xn) {
      zn = 0;
      xn = 0;
      if (!eng.reference_round) {
        for (const auto& inj : opt.injections) {
          if (inj.cycle == int(cycle_rng) && inj.gate_index < 0) {
            sv.apply_pauli(inj.pauli, eng.reg_of(inj.qubit, opt.multiplex_ancilla ? kNumData : -1));
          }
        }
      }
      if (opt.multiplex_ancilla) {
        for (int b = 0; b < 8; ++b) {
          for (std::size_t gi : blocks[b]) {
            eng.run_gate(circuit.gates[gi], gi, cycle_noise, cycle_rng, kNumData, zn, xn);
          }
        }
      } else {
        for (std::size_t gi = 0; gi < circuit.gates.size(); ++gi) {
          eng.run_gate(circuit.gates[gi], gi, cycle_noise, cycle_rng, -1, zn, xn);
        }
      }
    };

    SyndromeRecord rec;
    rec.shot_id = uint32_t(s);
    rec.protocol = 1;
    rec.z_syndromes.resize(n_cycles);
    rec.x_syndromes.resize(n_cycles);

    // Quiescent preparation round (noise-free, known syndromes).
    uint8_t z_ref = 0, x_ref = 0;
    eng.reference_round = true;
    run_cycle(0, detail::TrajectoryEngine::kReferenceCycle, z_ref, x_ref);
    eng.reference_round = false;

    for (int c = 0; c < n_cycles; ++c) {
      uint8_t zn = 0, xn = 0;
      run_cycle(std::size_t(c), uint32_t(c), zn, xn);
      rec.z_syndromes[c] = uint8_t((zn ^ z_ref) & 0x0F);
      rec.x_syndromes[c] = uint8_t((xn ^ x_ref) & 0x0F);
    }

    // Final data readout. The bits land on a random member of the
    // X-stabilizer orbit of |0..0>, whose H_Z syndrome and logical parity
    // are both zero, so they feed the decoder unshifted.
    for (const auto& inj : opt.injections) {
      if (inj.cycle == n_cycles && inj.gate_index < 0) {
        sv.apply_pauli(inj.pauli, inj.qubit);
      }
    }
    uint16_t bits = 0;
    for (int q = 0; q < kNumData; ++q) {
      if (opt.noise) {
        const double u = rng.uniform(RngPurpose::kDataReadout, uint32_t(s),
                                     uint32_t(n_cycles - 1), uint32_t(q));
        sv.apply_gad(gad.at(std::size_t(n_cycles - 1), q, Duration::kReadout), q, u);
      }
      const double uc = rng.uniform(RngPurpose::kMeasureCollapse, uint32_t(s),
                                    uint32_t(n_cycles - 1), 4096u + uint32_t(q));
      bits |= uint16_t(sv.measure(q, uc)) << q;
    }
    rec.data_bits = bits;
    records[s] = std::move(rec);
  });
  return records;
}

} // namespace radqec
