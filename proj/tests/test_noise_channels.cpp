#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "radqec/noise_channels.hpp"
#include "radqec/rng.hpp"
#include "test_helpers.hpp"

using namespace radqec;

TEST_CASE("gad choi matches the closed-form entries") {
  const double t1 = 100e-6, t2 = 200e-6, tg = 40e-9;
  auto ch = build_gad(t1, t2, tg, 1.0, 0.0);
  const double gam = 1.0 - std::exp(-tg / t1);
  CHECK(ch.choi(0, 0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(ch.choi(1, 1) == 0.0); // p1 = 0 zeroes the heating block
  CHECK(ch.choi(2, 2) == Catch::Approx(gam).epsilon(1e-12));
  CHECK(ch.choi(3, 3) == Catch::Approx(1.0 - gam).epsilon(1e-12));
  // Frozen: e^{-tg/T2} = 0.99980001999866673333.
  CHECK(ch.choi(0, 3) == Catch::Approx(0.99980001999866673333).epsilon(1e-15));
  CHECK(ch.choi(3, 0) == ch.choi(0, 3));

  // Mixed populations fill both damping blocks.
  auto mixed = build_gad(t1, t2, tg, 0.5, 0.5);
  CHECK(mixed.choi(1, 1) == Catch::Approx(0.5 * gam).epsilon(1e-12));
  CHECK(mixed.choi(2, 2) == Catch::Approx(0.5 * gam).epsilon(1e-12));
}

TEST_CASE("gad limits and rejections") {
  // t_gate -> 0: identity channel.
  auto ch = build_gad(100e-6, 200e-6, 1e-18);
  CHECK(ch.choi(0, 0) == Catch::Approx(1.0).epsilon(1e-13));
  CHECK(ch.choi(0, 3) == Catch::Approx(1.0).epsilon(1e-13));
  CHECK(ch.choi(2, 2) == Catch::Approx(0.0).margin(1e-13));

  CHECK_THROWS(build_gad(100e-6, 300e-6, 40e-9)); // T2 > 2 T1
  CHECK_THROWS(build_gad(-1.0, 200e-6, 40e-9));
  CHECK_THROWS(build_gad(100e-6, 200e-6, 40e-9, 0.7, 0.7)); // p0 + p1 != 1
}

TEST_CASE("kraus operators reconstruct the choi matrix and are complete") {
  CounterRng rng(5);
  for (uint32_t trial = 0; trial < 200; ++trial) {
    const double t1 = 1e-6 + 300e-6 * rng.uniform(RngPurpose::kGeneric, trial, 0, 0);
    const double t2 = t1 * (0.2 + 1.8 * rng.uniform(RngPurpose::kGeneric, trial, 1, 0));
    const double tg = 1e-9 + 200e-9 * rng.uniform(RngPurpose::kGeneric, trial, 2, 0);
    const double p1 = 0.5 * rng.uniform(RngPurpose::kGeneric, trial, 3, 0);
    auto ch = build_gad(t1, t2, tg, 1.0 - p1, p1);

    REQUIRE(test_helpers::choi_reconstruction_error(ch) < 1e-12);
    REQUIRE(test_helpers::kraus_completeness_error(ch) < 1e-12);
  }
}

TEST_CASE("kraus action equals the analytic channel action on random states") {
  CounterRng rng(6);
  for (uint32_t trial = 0; trial < 100; ++trial) {
    const double t1 = 50e-6, t2 = 70e-6, tg = 500e-9;
    auto ch = build_gad(t1, t2, tg, 0.9, 0.1);
    // Random single-qubit density matrix from a random pure state pair.
    const double a = rng.uniform(RngPurpose::kGeneric, trial, 0, 0);
    const double ph = 2 * kPi * rng.uniform(RngPurpose::kGeneric, trial, 1, 0);
    Eigen::Vector2cd psi(std::sqrt(1 - a), std::polar(std::sqrt(a), ph));
    Eigen::Matrix2cd rho = psi * psi.adjoint();

    Eigen::Matrix2cd via_kraus = Eigen::Matrix2cd::Zero();
    for (const auto& k : ch.kraus) via_kraus += k * rho * k.adjoint();
    Eigen::Matrix2cd exact = gad_apply_exact(ch, rho);
    REQUIRE((via_kraus - exact).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ptgad closed forms match the frozen reference") {
  auto ch = build_gad(100e-6, 200e-6, 40e-9);
  auto p = pauli_twirl(ch);
  // Frozen independent evaluation (mpmath, 20 digits).
  CHECK(p.p_x == Catch::Approx(9.9980002666400021e-5).epsilon(1e-12));
  CHECK(p.p_y == Catch::Approx(9.9980002666400021e-5).epsilon(1e-12));
  CHECK(p.p_z == Catch::Approx(9.998000233313335e-9).epsilon(1e-9));
  CHECK(p.p_i == Catch::Approx(0.99980002999666696664).epsilon(1e-15));
  CHECK(p.p_i + p.p_x + p.p_y + p.p_z == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("ptgad equals the numerically twirled gad channel") {
  CounterRng rng(7);
  for (uint32_t trial = 0; trial < 100; ++trial) {
    const double t1 = 1e-6 + 300e-6 * rng.uniform(RngPurpose::kGeneric, trial, 0, 0);
    const double t2 = t1 * (0.2 + 1.8 * rng.uniform(RngPurpose::kGeneric, trial, 1, 0));
    const double tg = 1e-9 + 300e-9 * rng.uniform(RngPurpose::kGeneric, trial, 2, 0);
    auto ch = build_gad(t1, t2, tg);
    auto closed = pauli_twirl(ch);
    auto numeric = test_helpers::numerical_twirl(ch);
    REQUIRE(std::abs(closed.p_i - numeric.p_i) < 1e-12);
    REQUIRE(std::abs(closed.p_x - numeric.p_x) < 1e-12);
    REQUIRE(std::abs(closed.p_y - numeric.p_y) < 1e-12);
    REQUIRE(std::abs(closed.p_z - numeric.p_z) < 1e-12);
  }
}

TEST_CASE("ptgad has no p0/p1 dependence and respects simplex bounds") {
  auto a = pauli_twirl(build_gad(80e-6, 110e-6, 60e-9, 1.0, 0.0));
  auto b = pauli_twirl(build_gad(80e-6, 110e-6, 60e-9, 0.5, 0.5));
  CHECK(a.p_x == b.p_x);
  CHECK(a.p_y == b.p_y);
  CHECK(a.p_z == b.p_z);
  CHECK(a.p_i == b.p_i);

  // T2 = 2 T1: P_Z = (1 - e^{-t/2T1})^2 / 4 exactly, tiny but nonnegative,
  // bounded by (t/T1)^2 / 4.
  for (double tg : {10e-9, 100e-9, 1e-6}) {
    auto p = pauli_twirl(build_gad(100e-6, 200e-6, tg));
    REQUIRE(p.p_z >= 0.0);
    REQUIRE(p.p_z <= 0.25 * (tg / 100e-6) * (tg / 100e-6));
  }

  // t -> 0: identity.
  auto tiny = pauli_twirl(build_gad(100e-6, 200e-6, 1e-16));
  CHECK(tiny.p_i == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("apply_kraus trajectory behavior") {
  // Identity-like channel leaves the state unchanged.
  {
    auto ch = build_gad(100e-6, 200e-6, 1e-15);
    std::vector<std::complex<double>> psi = {std::complex<double>(0.6, 0.0),
                                             std::complex<double>(0.0, 0.8)};
    auto copy = psi;
    apply_kraus(psi, 1, ch, 0, 0.3);
    REQUIRE(std::abs(psi[0] - copy[0]) < 1e-6);
    REQUIRE(std::abs(psi[1] - copy[1]) < 1e-6);
  }

  // |1> decays to |0> with probability -> 1 for long gates when p1 = 0.
  {
    auto ch = build_gad(100e-6, 200e-6, 100e-3); // t >> T1
    CounterRng rng(8);
    int zeros = 0;
    const int shots = 2000;
    for (int s = 0; s < shots; ++s) {
      std::vector<std::complex<double>> psi = {0.0, 1.0};
      apply_kraus(psi, 1, ch, 0,
                  rng.uniform(RngPurpose::kKrausSelect, uint32_t(s), 0, 0));
      if (std::norm(psi[0]) > 0.99) ++zeros;
    }
    CHECK(zeros == shots);
  }

  // Ensemble <Z> decay matches e^{-t/T1} to 3 sigma with 1e5 trajectories.
  {
    const double t1 = 100e-6, step = 10e-6;
    const int n_steps = 5, shots = 100000;
    auto ch = build_gad(t1, 2 * t1, step);
    CounterRng rng(9);
    int ones = 0;
    for (int s = 0; s < shots; ++s) {
      std::vector<std::complex<double>> psi = {0.0, 1.0};
      for (int k = 0; k < n_steps; ++k) {
        apply_kraus(psi, 1, ch, 0,
                    rng.uniform(RngPurpose::kKrausSelect, uint32_t(s), uint32_t(k), 0));
      }
      // P(|1>) readout without measurement noise.
      const double p1 = std::norm(psi[1]);
      if (rng.uniform(RngPurpose::kMeasureCollapse, uint32_t(s), 0, 0) < p1) ++ones;
    }
    const double expect = std::exp(-double(n_steps) * step / t1);
    const double phat = double(ones) / shots;
    const double sigma = std::sqrt(expect * (1 - expect) / shots);
    CHECK(std::abs(phat - expect) < 3 * sigma + 1e-12);
  }
}
