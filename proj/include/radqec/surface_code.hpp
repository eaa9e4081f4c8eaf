#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radqec {

enum class Pauli : uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };

// Rotated [[9,1,3]] surface code: 9 data qubits on a 3x3 grid with 1 mm pitch
// (times spacing_scale), 4 X-parity and 4 Z-parity ancillas. Qubit indices:
// 0..8 data (row-major), 9..12 X-ancillas, 13..16 Z-ancillas.
inline constexpr int kNumData = 9;
inline constexpr int kNumAncX = 4;
inline constexpr int kNumAncZ = 4;
inline constexpr int kNumQubits = 17;
inline constexpr int kFirstAncX = 9;
inline constexpr int kFirstAncZ = 13;

struct ParityMatrices {
  std::array<std::array<uint8_t, 9>, 4> hz;
  std::array<std::array<uint8_t, 9>, 4> hx;
};

inline ParityMatrices parity_matrices() {
  ParityMatrices m;
  m.hz = {{{1, 0, 0, 1, 0, 0, 0, 0, 0},
           {0, 1, 1, 0, 1, 1, 0, 0, 0},
           {0, 0, 0, 1, 1, 0, 1, 1, 0},
           {0, 0, 0, 0, 0, 1, 0, 0, 1}}};
  m.hx = {{{0, 1, 1, 0, 0, 0, 0, 0, 0},
           {1, 1, 0, 1, 1, 0, 0, 0, 0},
           {0, 0, 0, 0, 1, 1, 0, 1, 1},
           {0, 0, 0, 0, 0, 0, 1, 1, 0}}};
  return m;
}

// Z-basis logical operator support (a row of the data grid) and the X logical
// (a column); both weight 3.
inline constexpr std::array<int, 3> kLogicalZ = {0, 1, 2};
inline constexpr std::array<int, 3> kLogicalX = {0, 3, 6};

struct CodeLayout {
  double spacing_scale = 1.0;
  double chip_mm = 10.0;
  std::vector<std::string> qubit_ids;             // size 17
  std::vector<std::pair<double, double>> pos_mm;  // size 17

  double default_strike_x() const { return 1.7 * spacing_scale; }
  double default_strike_y() const { return 1.7 * spacing_scale; }
};

inline CodeLayout build_layout(double spacing_scale = 1.0) {
  if (!(spacing_scale > 0)) {
    throw std::invalid_argument("build_layout: spacing_scale must be > 0");
  }
  CodeLayout lay;
  lay.spacing_scale = spacing_scale;
  lay.chip_mm = 10.0 * spacing_scale;
  lay.qubit_ids.resize(kNumQubits);
  lay.pos_mm.resize(kNumQubits);

  const double s = spacing_scale;
  for (int i = 0; i < kNumData; ++i) {
    const int col = i % 3, row = i / 3;
    lay.qubit_ids[i] = "d" + std::to_string(i);
    lay.pos_mm[i] = {(1.0 + col) * s, (1.0 + row) * s};
  }
  const std::array<std::pair<double, double>, 4> xpos = {
      {{2.5, 0.5}, {1.5, 1.5}, {2.5, 2.5}, {1.5, 3.5}}};
  const std::array<std::pair<double, double>, 4> zpos = {
      {{0.5, 1.5}, {2.5, 1.5}, {1.5, 2.5}, {3.5, 2.5}}};
  for (int k = 0; k < 4; ++k) {
    lay.qubit_ids[kFirstAncX + k] = "x" + std::to_string(k);
    lay.pos_mm[kFirstAncX + k] = {xpos[k].first * s, xpos[k].second * s};
    lay.qubit_ids[kFirstAncZ + k] = "z" + std::to_string(k);
    lay.pos_mm[kFirstAncZ + k] = {zpos[k].first * s, zpos[k].second * s};
  }
  return lay;
}

enum class GateType : uint8_t { kH, kCX, kMeasure, kReset };

struct Gate {
  GateType type;
  int q0;      // H/M/R target, CX control
  int q1 = -1; // CX target
  double t_start_ns = 0.0;
  double t_dur_ns = 0.0;
};

struct GateTimes {
  double cx_ns = 40.0;
  double h_ns = 30.0;
  double readout_ns = 140.0;
};

// One stabilizer cycle. Gate order is deterministic: X-ancilla Hadamards,
// four CX layers, closing Hadamards, ancilla readout, ancilla reset.
struct StabilizerCircuit {
  std::vector<Gate> gates;
  double cycle_ns = 1000.0;
  GateTimes times;

  int n_qubits = kNumQubits;
};

// CX layer assignment per ancilla. X-plaquettes run (NW, NE, SW, SE) so a
// mid-sequence ancilla fault leaves an X pair on one data ROW; Z-plaquettes
// run (NW, SW, NE, SE), leaving Z hooks on one COLUMN. Both orientations are
// perpendicular to the corresponding logical, preserving distance 3 under
// circuit-level noise. Layer entries of -1 mean the (boundary) plaquette is
// idle in that layer.
inline const std::array<std::array<int, 4>, 8>& cx_layer_table() {
  static const std::array<std::array<int, 4>, 8> table = {{
      // x0..x3
      {{-1, -1, 1, 2}},
      {{0, 1, 3, 4}},
      {{4, 5, 7, 8}},
      {{6, 7, -1, -1}},
      // z0..z3
      {{-1, -1, 0, 3}},
      {{1, 4, 2, 5}},
      {{3, 6, 4, 7}},
      {{5, 8, -1, -1}},
  }};
  return table;
}

inline StabilizerCircuit build_cycle_circuit(const CodeLayout& layout,
                                             const GateTimes& times = {},
                                             double cycle_ns = 1000.0) {
  (void)layout; // geometry is fixed for d = 3; layout kept for interface parity
  StabilizerCircuit c;
  c.cycle_ns = cycle_ns;
  c.times = times;

  double t = 0.0;
  for (int k = 0; k < kNumAncX; ++k) {
    c.gates.push_back({GateType::kH, kFirstAncX + k, -1, t, times.h_ns});
  }
  t += times.h_ns;

  const auto& table = cx_layer_table();
  for (int layer = 0; layer < 4; ++layer) {
    for (int a = 0; a < 8; ++a) {
      const int data = table[a][layer];
      if (data < 0) continue;
      const int anc = (a < 4) ? kFirstAncX + a : kFirstAncZ + (a - 4);
      if (a < 4) {
        c.gates.push_back({GateType::kCX, anc, data, t, times.cx_ns});
      } else {
        c.gates.push_back({GateType::kCX, data, anc, t, times.cx_ns});
      }
    }
    t += times.cx_ns;
  }

  for (int k = 0; k < kNumAncX; ++k) {
    c.gates.push_back({GateType::kH, kFirstAncX + k, -1, t, times.h_ns});
  }
  t += times.h_ns;

  for (int q = kFirstAncX; q < kNumQubits; ++q) {
    c.gates.push_back({GateType::kMeasure, q, -1, t, times.readout_ns});
  }
  t += times.readout_ns;

  for (int q = kFirstAncX; q < kNumQubits; ++q) {
    c.gates.push_back({GateType::kReset, q, -1, t, 0.0});
  }

  if (t > cycle_ns) throw std::logic_error("build_cycle_circuit: span exceeds cycle");
  return c;
}

// Scheduling sanity: no two gates overlap in time on the same qubit and the
// whole cycle fits in the cycle window.
inline void validate_circuit(const StabilizerCircuit& c) {
  std::vector<std::vector<std::pair<double, double>>> busy(c.n_qubits);
  double span = 0.0;
  for (const auto& g : c.gates) {
    for (int q : {g.q0, g.q1}) {
      if (q < 0) continue;
      if (q >= c.n_qubits) throw std::logic_error("validate_circuit: bad qubit");
      for (const auto& [s, e] : busy[q]) {
        if (g.t_start_ns < e && s < g.t_start_ns + g.t_dur_ns) {
          throw std::logic_error("validate_circuit: overlapping gates on qubit " +
                                 std::to_string(q));
        }
      }
      busy[q].push_back({g.t_start_ns, g.t_start_ns + g.t_dur_ns});
    }
    span = std::max(span, g.t_start_ns + g.t_dur_ns);
  }
  if (span > c.cycle_ns) throw std::logic_error("validate_circuit: span > cycle");
}

// Plain-text gate list: name, qubit ids, t_start_ns, t_dur_ns.
inline std::string export_gate_list(const StabilizerCircuit& c) {
  std::ostringstream out;
  for (const auto& g : c.gates) {
    switch (g.type) {
      case GateType::kH: out << "H " << g.q0; break;
      case GateType::kCX: out << "CX " << g.q0 << ' ' << g.q1; break;
      case GateType::kMeasure: out << "MEASURE " << g.q0; break;
      case GateType::kReset: out << "RESET " << g.q0; break;
    }
    out << ' ' << g.t_start_ns << ' ' << g.t_dur_ns << '\n';
  }
  return out.str();
}

} // namespace radqec
