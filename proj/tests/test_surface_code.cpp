#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "radqec/surface_code.hpp"

using namespace radqec;

TEST_CASE("parity matrices are the published check matrices") {
  auto m = parity_matrices();
  // Spot rows quoted directly.
  CHECK(m.hz[1] == std::array<uint8_t, 9>{0, 1, 1, 0, 1, 1, 0, 0, 0});
  CHECK(m.hx[3] == std::array<uint8_t, 9>{0, 0, 0, 0, 0, 0, 1, 1, 0});
  // Full matrices.
  CHECK(m.hz[0] == std::array<uint8_t, 9>{1, 0, 0, 1, 0, 0, 0, 0, 0});
  CHECK(m.hz[2] == std::array<uint8_t, 9>{0, 0, 0, 1, 1, 0, 1, 1, 0});
  CHECK(m.hz[3] == std::array<uint8_t, 9>{0, 0, 0, 0, 0, 1, 0, 0, 1});
  CHECK(m.hx[0] == std::array<uint8_t, 9>{0, 1, 1, 0, 0, 0, 0, 0, 0});
  CHECK(m.hx[1] == std::array<uint8_t, 9>{1, 1, 0, 1, 1, 0, 0, 0, 0});
  CHECK(m.hx[2] == std::array<uint8_t, 9>{0, 0, 0, 0, 1, 1, 0, 1, 1});
}

TEST_CASE("css condition: hz * hx^T vanishes over gf(2)") {
  auto m = parity_matrices();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      int acc = 0;
      for (int q = 0; q < 9; ++q) acc ^= m.hz[a][q] & m.hx[b][q];
      REQUIRE(acc == 0);
    }
  }
}

TEST_CASE("minimum logical weight is 3 by exhaustive enumeration") {
  auto m = parity_matrices();
  // Z-basis bitflip logicals: kernel of H_Z with odd overlap on logical Z.
  int min_weight = 10;
  for (int e = 1; e < (1 << 9); ++e) {
    bool kernel = true;
    for (int k = 0; k < 4 && kernel; ++k) {
      int s = 0;
      for (int q = 0; q < 9; ++q) {
        if (m.hz[k][q]) s ^= (e >> q) & 1;
      }
      kernel = (s == 0);
    }
    if (!kernel) continue;
    int overlap = 0;
    for (int q : kLogicalZ) overlap ^= (e >> q) & 1;
    if (!overlap) continue;
    min_weight = std::min(min_weight, __builtin_popcount(unsigned(e)));
  }
  CHECK(min_weight == 3);
}

TEST_CASE("layout geometry and scaling") {
  auto l1 = build_layout(1.0);
  REQUIRE(l1.qubit_ids.size() == 17);
  CHECK(l1.chip_mm == 10.0);
  for (auto [x, y] : l1.pos_mm) {
    REQUIRE(x > 0.0);
    REQUIRE(x < l1.chip_mm);
    REQUIRE(y > 0.0);
    REQUIRE(y < l1.chip_mm);
  }
  // Nearest-neighbor data pitch is 1 mm at scale 1.
  const double dx = l1.pos_mm[1].first - l1.pos_mm[0].first;
  CHECK(dx == Catch::Approx(1.0));

  auto l2 = build_layout(2.0);
  CHECK(l2.chip_mm == 20.0);
  auto l4 = build_layout(4.0);
  CHECK(l4.chip_mm == 40.0);
  // All pairwise distances exactly doubled at scale 2.
  for (int a = 0; a < 17; ++a) {
    for (int b = a + 1; b < 17; ++b) {
      const double d1 = std::hypot(l1.pos_mm[a].first - l1.pos_mm[b].first,
                                   l1.pos_mm[a].second - l1.pos_mm[b].second);
      const double d2 = std::hypot(l2.pos_mm[a].first - l2.pos_mm[b].first,
                                   l2.pos_mm[a].second - l2.pos_mm[b].second);
      REQUIRE(d2 == Catch::Approx(2.0 * d1).epsilon(1e-12));
    }
  }
  // Strike scaling convention.
  CHECK(l2.default_strike_x() == Catch::Approx(3.4));
  CHECK(l4.default_strike_x() == Catch::Approx(6.8));
}

TEST_CASE("cycle circuit structure, timing, determinism") {
  auto layout = build_layout(1.0);
  auto c = build_cycle_circuit(layout);
  validate_circuit(c);

  int n_h = 0, n_cx = 0, n_m = 0, n_r = 0;
  for (const auto& g : c.gates) {
    switch (g.type) {
      case GateType::kH:
        ++n_h;
        CHECK(g.t_dur_ns == 30.0);
        break;
      case GateType::kCX:
        ++n_cx;
        CHECK(g.t_dur_ns == 40.0);
        break;
      case GateType::kMeasure:
        ++n_m;
        CHECK(g.t_dur_ns == 140.0);
        break;
      case GateType::kReset:
        ++n_r;
        break;
    }
  }
  CHECK(n_h == 8);   // two layers of Hadamards on the four X ancillas
  CHECK(n_cx == 24); // 4 + 4 + 2 + 2 per basis
  CHECK(n_m == 8);
  CHECK(n_r == 8);

  // Each CX couples exactly one ancilla and one data qubit, with the
  // direction set by the stabilizer basis.
  for (const auto& g : c.gates) {
    if (g.type != GateType::kCX) continue;
    const bool x_type = g.q0 >= kFirstAncX && g.q0 < kFirstAncZ;
    if (x_type) {
      CHECK(g.q1 < kNumData);
    } else {
      CHECK(g.q0 < kNumData);
      CHECK(g.q1 >= kFirstAncZ);
    }
  }

  // Deterministic construction.
  auto c2 = build_cycle_circuit(layout);
  REQUIRE(c.gates.size() == c2.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    CHECK(c.gates[i].type == c2.gates[i].type);
    CHECK(c.gates[i].q0 == c2.gates[i].q0);
    CHECK(c.gates[i].q1 == c2.gates[i].q1);
    CHECK(c.gates[i].t_start_ns == c2.gates[i].t_start_ns);
  }
}

TEST_CASE("cx layer table covers the parity matrices exactly") {
  const auto& table = cx_layer_table();
  auto m = parity_matrices();
  for (int a = 0; a < 8; ++a) {
    std::set<int> touched;
    for (int l = 0; l < 4; ++l) {
      if (table[a][l] >= 0) touched.insert(table[a][l]);
    }
    const auto& row = (a < 4) ? m.hx[a] : m.hz[a - 4];
    std::set<int> expect;
    for (int q = 0; q < 9; ++q) {
      if (row[q]) expect.insert(q);
    }
    REQUIRE(touched == expect);
  }
  // No data qubit is used twice within a layer.
  for (int l = 0; l < 4; ++l) {
    std::set<int> used;
    for (int a = 0; a < 8; ++a) {
      if (table[a][l] < 0) continue;
      REQUIRE(!used.count(table[a][l]));
      used.insert(table[a][l]);
    }
  }
}

TEST_CASE("gate list export is parseable") {
  auto c = build_cycle_circuit(build_layout(1.0));
  const std::string text = export_gate_list(c);
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    REQUIRE((name == "H" || name == "CX" || name == "MEASURE" || name == "RESET"));
  }
  CHECK(lines == c.gates.size());
}
