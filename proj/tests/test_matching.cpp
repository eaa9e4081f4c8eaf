#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "radqec/matching.hpp"
#include "radqec/rng.hpp"

using namespace radqec;

namespace {

// Brute-force minimum-weight perfect matching over all pairings.
int64_t brute_min(const std::vector<std::vector<int64_t>>& w,
                  std::vector<int>& left) {
  if (left.empty()) return 0;
  const int a = left[0];
  int64_t best = std::numeric_limits<int64_t>::max() / 4;
  for (std::size_t j = 1; j < left.size(); ++j) {
    const int b = left[j];
    if (w[a][b] < 0) continue; // missing edge
    std::vector<int> rest;
    for (std::size_t k = 1; k < left.size(); ++k) {
      if (k != j) rest.push_back(left[k]);
    }
    const int64_t sub = brute_min(w, rest);
    if (sub < std::numeric_limits<int64_t>::max() / 8) {
      best = std::min(best, w[a][b] + sub);
    }
  }
  return best;
}

int64_t brute_min(const std::vector<std::vector<int64_t>>& w) {
  std::vector<int> all(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) all[i] = int(i);
  return brute_min(w, all);
}

} // namespace

TEST_CASE("matching on two and four vertices") {
  {
    DenseMatcher m(2);
    m.set_weight(0, 1, 7);
    CHECK(m.solve() == 7);
    CHECK(m.mates()[0] == 1);
    CHECK(m.mates()[1] == 0);
  }
  {
    // Pairing (0-1, 2-3) = 2 + 3 = 5; (0-2, 1-3) = 4 + 4 = 8; (0-3, 1-2) = 10 + 1 = 11.
    DenseMatcher m(4);
    m.set_weight(0, 1, 2);
    m.set_weight(2, 3, 3);
    m.set_weight(0, 2, 4);
    m.set_weight(1, 3, 4);
    m.set_weight(0, 3, 10);
    m.set_weight(1, 2, 1);
    CHECK(m.solve() == 5);
    CHECK(m.mates()[0] == 1);
    CHECK(m.mates()[2] == 3);
  }
}

TEST_CASE("matching forces blossom structures") {
  // Odd cycle of cheap edges plus expensive escapes; optimum must shrink a
  // blossom to see it. Triangle 0-1-2 cheap, each connected to 3,4,5.
  DenseMatcher m(6);
  std::vector<std::vector<int64_t>> w(6, std::vector<int64_t>(6, 50));
  auto set = [&](int a, int b, int64_t v) { w[a][b] = w[b][a] = v; };
  set(0, 1, 1);
  set(1, 2, 1);
  set(0, 2, 1);
  set(0, 3, 10);
  set(1, 4, 20);
  set(2, 5, 30);
  set(3, 4, 2);
  set(4, 5, 2);
  set(3, 5, 2);
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) m.set_weight(a, b, w[a][b]);
  }
  CHECK(m.solve() == brute_min(w));
}

TEST_CASE("matching equals brute force on random complete graphs") {
  CounterRng rng(31337);
  for (uint32_t trial = 0; trial < 400; ++trial) {
    const int n = 2 * (1 + int(rng.uniform(RngPurpose::kGeneric, trial, 0, 0) * 5)); // 2..10
    std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, 0));
    DenseMatcher m(n);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const int64_t v =
            1 + int64_t(rng.uniform(RngPurpose::kGeneric, trial, a + 1, b) * 100);
        w[a][b] = w[b][a] = v;
        m.set_weight(a, b, v);
      }
    }
    const int64_t got = m.solve();
    const int64_t want = brute_min(w);
    REQUIRE(got == want);
    // Matching consistency.
    const auto& mates = m.mates();
    for (int a = 0; a < n; ++a) {
      REQUIRE(mates[a] >= 0);
      REQUIRE(mates[mates[a]] == a);
    }
  }
}

TEST_CASE("matching equals brute force with tight uniform weights") {
  // Degenerate weights exercise tie handling in the duals.
  CounterRng rng(77);
  for (uint32_t trial = 0; trial < 200; ++trial) {
    const int n = 8;
    std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, 0));
    DenseMatcher m(n);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const int64_t v =
            1024 * (1 + int64_t(rng.uniform(RngPurpose::kGeneric, trial, a, b) * 3));
        w[a][b] = w[b][a] = v;
        m.set_weight(a, b, v);
      }
    }
    REQUIRE(m.solve() == brute_min(w));
  }
}

TEST_CASE("matching respects missing edges") {
  // Path graph 0-1-2-3: only pairing is (0-1)(2-3).
  DenseMatcher m(4);
  m.set_weight(0, 1, 5);
  m.set_weight(1, 2, 1);
  m.set_weight(2, 3, 5);
  CHECK(m.solve() == 10);
}

TEST_CASE("matching determinism") {
  auto build = [] {
    DenseMatcher m(6);
    int64_t v = 3;
    for (int a = 0; a < 6; ++a) {
      for (int b = a + 1; b < 6; ++b) {
        m.set_weight(a, b, (v = (v * 7 + 5) % 50 + 1));
      }
    }
    m.solve();
    return m.mates();
  };
  CHECK(build() == build());
}
