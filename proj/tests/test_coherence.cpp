#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "radqec/coherence.hpp"
#include "radqec/rng.hpp"

using namespace radqec;

TEST_CASE("effective temperature round trip and anchors") {
  TransmonParams p;
  // Forward/inverse identity: T -> x_qp -> T to 1e-9 relative.
  for (double t_mk : {50.0, 150.0, 250.0, 400.0}) {
    const double x = x_qp_equilibrium(t_mk / 1000.0, p.gap_al_uev);
    const double back = effective_temperature(x, p.gap_al_uev);
    REQUIRE(back == Catch::Approx(t_mk / 1000.0).epsilon(1e-9));
  }
  // Independently frozen: x_qp(250 mK) = 1.18806216554e-4.
  CHECK(x_qp_equilibrium(0.250, 191.0) == Catch::Approx(1.18806216554e-4).epsilon(1e-9));
  CHECK(effective_temperature(1.5e-4, 191.0) == Catch::Approx(0.25637763).epsilon(1e-6));

  // Monotone in x_qp.
  double prev = 0.0;
  for (double x = 1e-8; x < 0.5; x *= 3.0) {
    const double t = effective_temperature(x, 191.0);
    REQUIRE(t > prev);
    prev = t;
  }
  CHECK_THROWS_AS(effective_temperature(0.0, 191.0), std::domain_error);
  CHECK_THROWS_AS(effective_temperature(-1e-3, 191.0), std::domain_error);
}

TEST_CASE("delta gamma1 is exactly linear with the frozen reference value") {
  TransmonParams p;
  CHECK(delta_gamma1(0.0, p) == 0.0);
  // Independent mpmath evaluation with CODATA constants: 42980.737337611839.
  CHECK(delta_gamma1(1e-6, p) == Catch::Approx(42980.737337611839).epsilon(1e-12));
  // Linearity exact to floating point: (2x)/pi * c == 2 * (x/pi * c).
  for (double x : {1e-9, 3.7e-6, 2.2e-4, 0.013}) {
    REQUIRE(delta_gamma1(2 * x, p) == 2 * delta_gamma1(x, p));
  }
}

TEST_CASE("delta gamma_phi: zero limit, route agreement, subdominance") {
  TransmonParams p;
  CHECK(delta_gamma_phi(0.0, p) == 0.0);

  // Route A (library, x_qp form) vs route B (T_eff form) at x = 1e-5 and
  // across the range; the App-B derivation makes them algebraically equal.
  for (double x : {1e-7, 1e-5, 1e-4, 1e-3, 0.05}) {
    const double a = delta_gamma_phi(x, p);
    const double t_eff = effective_temperature(x, p.gap_al_uev);
    const double gap_j = p.gap_al_uev * kMicroeVToJoule;
    const double kt = kBoltzmann * t_eff;
    const double b = (2.0 * kPi * p.ec_hz) * (kt / (kPi * gap_j)) * std::exp(-gap_j / kt);
    REQUIRE(a == Catch::Approx(b).epsilon(1e-9));
  }
  // Frozen independent value at x = 1e-5: 952.68158145 1/s.
  CHECK(delta_gamma_phi(1e-5, p) == Catch::Approx(952.68158145).epsilon(1e-9));

  // Dephasing stays subdominant: 2 T1 Gamma_phi < 1 over the full range.
  for (double x = 1e-8; x < 0.5; x *= 1.7) {
    const double g1 = 1.0 / p.t1_base_s + delta_gamma1(x, p);
    const double val = 2.0 * (1.0 / g1) * delta_gamma_phi(x, p);
    REQUIRE(val < 1.0);
  }
}

TEST_CASE("tiny x_qp evaluates without overflow or underflow") {
  TransmonParams p;
  for (double x = 1e-15; x > 1e-300; x *= 1e-15) {
    const double g1 = delta_gamma1(x, p);
    const double gphi = delta_gamma_phi(x, p);
    REQUIRE(std::isfinite(g1));
    REQUIRE(std::isfinite(gphi));
    REQUIRE(g1 >= 0.0);
    REQUIRE(gphi >= 0.0);
  }
  // Deep below threshold both rates are vanishing against the baselines.
  const double base1 = 1.0 / p.t1_base_s;
  CHECK(delta_gamma1(1e-30, p) <= 1e-20 * base1);
  CHECK(delta_gamma_phi(1e-30, p) <= 1e-20 * base1);
}

TEST_CASE("schedule at zero density is the baseline pair (T1b, 2 T1b)") {
  TransmonParams p;
  QpDensity d;
  d.n_cp_um3 = 4.4e6;
  d.time_s = {0.0, 1e-6, 2e-6, 3e-6, 4e-6};
  d.x_qp = {std::vector<double>(5, 0.0), std::vector<double>(5, 0.0)};
  auto sched = build_schedule(d, {p, p}, 1e-6);
  REQUIRE(sched.n_cycles() == 4);
  REQUIRE(sched.n_qubits() == 2);
  for (std::size_t c = 0; c < sched.n_cycles(); ++c) {
    for (std::size_t q = 0; q < 2; ++q) {
      // T2_base = 200 us = 2 T1_base, so the zero-density entry is exactly
      // (T1b, 2 T1b) when Gamma_phi_base = 0.
      CHECK(sched.at(c, q).t1_s == Catch::Approx(p.t1_base_s).epsilon(1e-12));
      CHECK(sched.at(c, q).t2_s == Catch::Approx(2 * p.t1_base_s).epsilon(1e-12));
    }
  }
}

TEST_CASE("schedule tracks burst rise and recovery, physical everywhere") {
  TransmonParams p;
  QpDensity d;
  d.n_cp_um3 = 4.4e6;
  const int n = 120;
  d.time_s.resize(n);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    d.time_s[i] = i * 1e-6;
    const double t = i - 10.0;
    x[i] = (t < 0) ? 0.0 : 2e-4 * (1 - std::exp(-t / 2.0)) * std::exp(-t / 40.0);
  }
  d.x_qp = {x};
  auto sched = build_schedule(d, {p}, 1e-6);

  // T1 never exceeds the baseline and dips during the burst.
  double t1_min = 1.0;
  for (std::size_t c = 0; c < sched.n_cycles(); ++c) {
    const auto& e = sched.at(c, 0);
    REQUIRE(e.t1_s <= p.t1_base_s * (1 + 1e-12));
    REQUIRE(e.t2_s <= 2 * e.t1_s * (1 + 1e-12));
    REQUIRE(e.t2_s > 0);
    t1_min = std::min(t1_min, e.t1_s);
  }
  CHECK(t1_min < 0.1 * p.t1_base_s);
  // Recovery: the tail end is closer to baseline than the burst floor.
  CHECK(sched.at(sched.n_cycles() - 1, 0).t1_s > 10 * t1_min);

  // x sampled at cycle start: cycle 10 still sees x = 0 exactly.
  CHECK(sched.at(10, 0).t1_s == Catch::Approx(p.t1_base_s).epsilon(1e-12));
}

TEST_CASE("schedule resampling control") {
  TransmonParams p;
  QpDensity d;
  d.n_cp_um3 = 4.4e6;
  d.time_s = {0.0, 0.4e-6, 0.8e-6, 1.2e-6, 1.6e-6, 2.0e-6};
  d.x_qp = {std::vector<double>(6, 1e-5)};
  ScheduleOptions strict;
  strict.allow_resample = false;
  CHECK_THROWS(build_schedule(d, {p}, 1e-6, strict));
  auto ok = build_schedule(d, {p}, 1e-6); // default resamples
  CHECK(ok.n_cycles() == 2);
  ScheduleOptions avg;
  avg.sampling = CycleSampling::kCycleAverage;
  CHECK(build_schedule(d, {p}, 1e-6, avg).n_cycles() == 2);
}

TEST_CASE("transmon parameter validation") {
  TransmonParams p;
  CHECK(p.ej_over_ec() == Catch::Approx(23.085).epsilon(1e-3));
  p.validate();
  TransmonParams bad = p;
  bad.t2_base_s = 3 * bad.t1_base_s;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.t1_base_s = -1;
  CHECK_THROWS(bad.validate());
}
