#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "radqec/matching.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

// Syndrome differences D_i = S_{i-1} xor S_i. Cycle 0 compares against the
// noise-free preparation reference, which is identically zero in the flip
// representation used by the records, so D_0 = S_0.
inline std::vector<uint8_t> syndrome_differences(const std::vector<uint8_t>& syndromes) {
  std::vector<uint8_t> diff(syndromes.size());
  uint8_t prev = 0;
  for (std::size_t i = 0; i < syndromes.size(); ++i) {
    diff[i] = uint8_t((syndromes[i] ^ prev) & 0x0F);
    prev = syndromes[i];
  }
  return diff;
}

struct DecodeResult {
  uint16_t correction = 0; // data-qubit flip mask
  int64_t weight = 0;      // total matching weight in scaled integer units
  // Matched defect pairs as indices into the fired-detector list; -1 means
  // matched to the boundary.
  std::vector<std::pair<int, int>> matches;
};

// Matching graph over (cycle layer, stabilizer) detector sites constructed
// with repetition from a parity matrix: space-like edges are the matrix
// columns, time-like edges connect the same stabilizer in adjacent layers.
// Uniform weights, except that boundary edges carry one extra quantum
// (1/1024 of an edge) so that degenerate ties resolve toward defect-defect
// pairings; see decode() for why that is load-bearing.
class DetectorGraph {
 public:
  static constexpr int64_t kUnit = 1024;     // space/time edge weight
  static constexpr int64_t kBoundary = 1025; // boundary edge weight

  static DetectorGraph from_parity(const std::array<std::array<uint8_t, 9>, 4>& rows) {
    DetectorGraph g;
    g.rows_ = rows;
    // Column structure: single-row columns are boundary edges, two-row
    // columns are internal edges.
    std::array<std::array<int, 4>, 4> adj_col; // lowest column joining a pair
    for (auto& r : adj_col) r.fill(-1);
    std::array<int, 4> bnd_col;
    bnd_col.fill(-1);
    for (int q = 0; q < 9; ++q) {
      std::vector<int> touched;
      for (int k = 0; k < 4; ++k) {
        if (rows[k][q]) touched.push_back(k);
      }
      if (touched.empty()) continue;
      if (touched.size() == 1) {
        if (bnd_col[touched[0]] < 0) bnd_col[touched[0]] = q;
      } else if (touched.size() == 2) {
        auto& slot = adj_col[touched[0]][touched[1]];
        if (slot < 0) slot = q;
        adj_col[touched[1]][touched[0]] = adj_col[touched[0]][touched[1]];
      } else {
        throw std::invalid_argument("DetectorGraph: column touches > 2 stabilizers");
      }
    }

    // All-pairs spatial steps and path masks by Dijkstra over the 4-node
    // stabilizer graph (deterministic lowest-index expansion).
    for (int src = 0; src < 4; ++src) {
      std::array<int, 4> dist;
      std::array<uint16_t, 4> mask;
      dist.fill(1 << 20);
      mask.fill(0);
      dist[src] = 0;
      std::array<bool, 4> done{};
      for (int it = 0; it < 4; ++it) {
        int best = -1;
        for (int k = 0; k < 4; ++k) {
          if (!done[k] && dist[k] < (1 << 20) && (best < 0 || dist[k] < dist[best])) best = k;
        }
        if (best < 0) break;
        done[best] = true;
        for (int k = 0; k < 4; ++k) {
          if (adj_col[best][k] >= 0 && dist[best] + 1 < dist[k]) {
            dist[k] = dist[best] + 1;
            mask[k] = uint16_t(mask[best] ^ (1u << adj_col[best][k]));
          }
        }
      }
      for (int k = 0; k < 4; ++k) {
        g.steps_[src][k] = dist[k];
        g.path_mask_[src][k] = mask[k];
      }
    }

    // Boundary reach per stabilizer: own boundary column, or the cheapest
    // route through a neighbor that has one.
    for (int k = 0; k < 4; ++k) {
      int best_steps = 1 << 20;
      uint16_t best_mask = 0;
      for (int r = 0; r < 4; ++r) {
        if (bnd_col[r] < 0 || g.steps_[k][r] >= (1 << 20)) continue;
        const int s = g.steps_[k][r] + 1;
        if (s < best_steps) {
          best_steps = s;
          best_mask = uint16_t(g.path_mask_[k][r] ^ (1u << bnd_col[r]));
        }
      }
      if (best_steps >= (1 << 20)) {
        throw std::invalid_argument("DetectorGraph: stabilizer cannot reach boundary");
      }
      g.bnd_steps_[k] = best_steps;
      g.bnd_mask_[k] = best_mask;
    }
    return g;
  }

  // Weight of the cheapest defect-defect connection (no boundary hops).
  int64_t pair_weight(int l1, int k1, int l2, int k2) const {
    const int steps = steps_[k1][k2];
    if (steps >= (1 << 20)) return -1;
    return kUnit * (std::abs(l1 - l2) + steps);
  }

  int64_t boundary_weight(int k) const {
    return kUnit * (bnd_steps_[k] - 1) + kBoundary;
  }

  uint16_t pair_mask(int k1, int k2) const { return path_mask_[k1][k2]; }
  uint16_t boundary_mask(int k) const { return bnd_mask_[k]; }

  // Decode detector nibbles (one per layer). The caller builds the layer
  // sequence: cycle differences, optionally followed by the data-derived
  // final layer for state-chained runs.
  DecodeResult decode(const std::vector<uint8_t>& detector_nibbles) const {
    struct Defect {
      int layer, stab;
    };
    std::vector<Defect> defects;
    for (std::size_t l = 0; l < detector_nibbles.size(); ++l) {
      const uint8_t nib = detector_nibbles[l];
      for (int k = 0; k < 4; ++k) {
        if (nib & (1u << k)) defects.push_back({int(l), k});
      }
    }
    DecodeResult result;
    if (defects.empty()) return result;
    const int nd = int(defects.size());

    // A defect pair is worth connecting directly only when the connection is
    // cheaper than retiring both to the boundary; everything else decomposes.
    // Union-find over eligible pairs.
    std::vector<int> parent(nd);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    auto eligible = [&](int i, int j) {
      const int64_t d = pair_weight(defects[i].layer, defects[i].stab,
                                    defects[j].layer, defects[j].stab);
      if (d < 0) return false;
      return d < boundary_weight(defects[i].stab) + boundary_weight(defects[j].stab);
    };
    for (int i = 0; i < nd; ++i) {
      for (int j = i + 1; j < nd; ++j) {
        // Layer-sorted defect list would allow an early break; defect counts
        // here are small enough that the plain scan is not the bottleneck.
        if (defects[j].layer - defects[i].layer > 3) continue;
        if (eligible(i, j)) {
          const int a = find(i), b = find(j);
          if (a != b) parent[a] = b;
        }
      }
    }

    std::vector<std::vector<int>> components;
    {
      std::vector<int> comp_id(nd, -1);
      for (int i = 0; i < nd; ++i) {
        const int root = find(i);
        int& id = comp_id[root];
        if (id < 0) {
          id = int(components.size());
          components.push_back({});
        }
        components[id].push_back(i);
      }
    }

    result.matches.assign(nd, {-1, -1});
    std::vector<char> matched_to_boundary(nd, 0);
    for (const auto& comp : components) {
      if (comp.size() == 1) {
        const int i = comp[0];
        result.weight += boundary_weight(defects[i].stab);
        result.correction ^= boundary_mask(defects[i].stab);
        result.matches[i] = {i, -1};
        continue;
      }
      // Virtual boundary twin per defect: real-real edges where eligible,
      // real-twin at the boundary weight, twin-twin free.
      const int m = int(comp.size());
      DenseMatcher matcher(2 * m);
      for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
          if (eligible(comp[a], comp[b])) {
            matcher.set_weight(a, b,
                               pair_weight(defects[comp[a]].layer, defects[comp[a]].stab,
                                           defects[comp[b]].layer, defects[comp[b]].stab));
          }
          matcher.set_weight(m + a, m + b, 0);
        }
        matcher.set_weight(a, m + a, boundary_weight(defects[comp[a]].stab));
      }
      result.weight += matcher.solve();
      const auto& mates = matcher.mates();
      for (int a = 0; a < m; ++a) {
        const int mate = mates[a];
        if (mate == m + a) {
          result.correction ^= boundary_mask(defects[comp[a]].stab);
          result.matches[comp[a]] = {comp[a], -1};
          matched_to_boundary[comp[a]] = 1;
        } else if (mate < m && mate > a) {
          result.correction ^= pair_mask(defects[comp[a]].stab, defects[comp[mate]].stab);
          result.matches[comp[a]] = {comp[a], comp[mate]};
          result.matches[comp[mate]] = {comp[a], comp[mate]};
        }
      }
    }
    return result;
  }

 private:
  std::array<std::array<uint8_t, 9>, 4> rows_{};
  int steps_[4][4] = {};
  uint16_t path_mask_[4][4] = {};
  int bnd_steps_[4] = {};
  uint16_t bnd_mask_[4] = {};
};

// Logical parity over the logical-Z support after correction; 1 = logical
// error relative to the encoded value.
inline int logical_verdict(uint16_t corrected_data_bits, int encoded_value = 0) {
  int parity = 0;
  for (int q : kLogicalZ) parity ^= int((corrected_data_bits >> q) & 1u);
  return parity ^ (encoded_value & 1);
}

// Convenience composition used by both protocols: build detector layers from
// a record (cycle differences + the data-derived final layer for chained
// runs), decode, apply the correction, and report the verdict.
struct DecodedShot {
  int verdict = 0;
  int uncorrected = 0;
  DecodeResult decode;
};

inline uint8_t derived_syndrome(uint16_t data_bits,
                                const std::array<std::array<uint8_t, 9>, 4>& rows) {
  uint8_t nib = 0;
  for (int k = 0; k < 4; ++k) {
    int parity = 0;
    for (int q = 0; q < 9; ++q) {
      if (rows[k][q]) parity ^= int((data_bits >> q) & 1u);
    }
    nib |= uint8_t(parity) << k;
  }
  return nib;
}

inline DecodedShot decode_z_record(const DetectorGraph& graph,
                                   const std::array<std::array<uint8_t, 9>, 4>& hz,
                                   const std::vector<uint8_t>& z_syndromes,
                                   uint16_t data_bits, bool include_data_layer,
                                   int encoded_value = 0) {
  std::vector<uint8_t> layers = z_syndromes;
  if (include_data_layer) layers.push_back(derived_syndrome(data_bits, hz));
  const auto detectors = syndrome_differences(layers);
  DecodedShot shot;
  shot.decode = graph.decode(detectors);
  shot.uncorrected = logical_verdict(data_bits, encoded_value);
  shot.verdict = logical_verdict(data_bits ^ shot.decode.correction, encoded_value);
  return shot;
}

} // namespace radqec
