#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "radqec/lambert.hpp"
#include "radqec/rng.hpp"

using namespace radqec;

namespace {

// Bisection oracle on f(w) = w e^w - z, independent of the Halley path.
double bisect_w0(double z, double lo, double hi) {
  auto f = [&](double w) { return w * std::exp(w) - z; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double residual_rel(double w, double z) {
  return std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z));
}

} // namespace

TEST_CASE("lambert w0 anchor values") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::exp(1.0)) == Catch::Approx(1.0).epsilon(1e-14));
  // Oracle: bisection on w e^w - 1 over [0, 1].
  const double w1 = bisect_w0(1.0, 0.0, 1.0);
  CHECK(w1 == Catch::Approx(0.5671432904097838).epsilon(1e-12));
  CHECK(lambert_w0(1.0) == Catch::Approx(w1).epsilon(1e-12));
  CHECK(lambert_w0(-std::exp(-1.0)) == Catch::Approx(-1.0).margin(1e-7));
}

TEST_CASE("lambert w0 domain error below -1/e") {
  CHECK_THROWS_AS(lambert_w0(-0.4), std::domain_error);
  CHECK_THROWS_AS(lambert_w0(-1.0), std::domain_error);
}

TEST_CASE("lambert w0 residual property over log-uniform samples") {
  CounterRng rng(2024);
  // Positive branch: z log-uniform in [1e-12, 1e30].
  for (uint32_t i = 0; i < 10000; ++i) {
    const double u = rng.uniform(RngPurpose::kGeneric, i, 0, 0);
    const double z = std::pow(10.0, -12.0 + 42.0 * u);
    const double w = lambert_w0(z);
    REQUIRE(residual_rel(w, z) <= 1e-12);
  }
  // Negative branch: z in (-1/e, 0), log-uniform in magnitude.
  for (uint32_t i = 0; i < 4000; ++i) {
    const double u = rng.uniform(RngPurpose::kGeneric, i, 1, 0);
    const double z = -std::exp(-1.0) * std::pow(10.0, -14.0 * (1.0 - u));
    const double w = lambert_w0(z);
    REQUIRE(residual_rel(w, z) <= 1e-12);
  }
  // Near the branch point.
  for (uint32_t i = 0; i < 2000; ++i) {
    const double u = rng.uniform(RngPurpose::kGeneric, i, 2, 0);
    const double z = -std::exp(-1.0) + std::pow(10.0, -15.0 + 13.0 * u);
    const double w = lambert_w0(z);
    REQUIRE(w >= -1.0);
    REQUIRE(residual_rel(w, z) <= 1e-12);
  }
}

TEST_CASE("lambert w0 log-argument form for huge inputs") {
  // w + log w = log z checked directly; covers the overflow-free path.
  for (double logz : {40.0, 100.0, 400.0, 700.0}) {
    const double w = detail::lambert_w0_from_log(logz);
    CHECK(w + std::log(w) == Catch::Approx(logz).epsilon(1e-13));
  }
  CHECK(lambert_w0(1e30) + std::log(lambert_w0(1e30)) ==
        Catch::Approx(std::log(1e30)).epsilon(1e-13));
}

TEST_CASE("lambert w0 monotone") {
  double prev = lambert_w0(-0.3);
  for (double z = -0.29; z < 5.0; z += 0.01) {
    const double w = lambert_w0(z);
    REQUIRE(w > prev);
    prev = w;
  }
}
