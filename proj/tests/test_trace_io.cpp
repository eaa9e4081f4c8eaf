#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "radqec/rng.hpp"
#include "radqec/trace_io.hpp"

using namespace radqec;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

QpTrace random_trace(uint64_t seed, int qubits, int samples) {
  CounterRng rng(seed);
  QpTrace t;
  t.time_s.resize(samples);
  for (int i = 0; i < samples; ++i) t.time_s[i] = i * 0.5e-6;
  for (int q = 0; q < qubits; ++q) {
    t.qubit_ids.push_back("d" + std::to_string(q));
    std::vector<double> g(samples);
    for (int i = 0; i < samples; ++i) {
      g[i] = 1e4 * rng.uniform(RngPurpose::kGeneric, uint32_t(q), uint32_t(i), 0);
    }
    t.generation.push_back(std::move(g));
  }
  t.meta.strike_mm_x = 1.7;
  t.meta.strike_mm_y = 1.7;
  t.meta.mitigation_um = 0.5;
  t.meta.synthetic = true;
  return t;
}

} // namespace

TEST_CASE("native trace round trip is bit exact") {
  const auto path = temp_path("radqec_trace_roundtrip.qpt");
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    auto t = random_trace(seed, 4, 57);
    save_trace(t, path);
    auto u = load_trace(path);
    REQUIRE(u.qubit_ids == t.qubit_ids);
    REQUIRE(u.generation == t.generation); // exact doubles via %.17g
    for (std::size_t i = 0; i < t.time_s.size(); ++i) {
      REQUIRE(u.time_s[i] == Catch::Approx(t.time_s[i]).epsilon(1e-15));
    }
    REQUIRE(u.meta.mitigation_um == t.meta.mitigation_um);
    REQUIRE(u.meta.synthetic == t.meta.synthetic);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv trace variant loads and round trips") {
  const auto path = temp_path("radqec_trace.csv");
  auto t = random_trace(9, 3, 41);
  save_trace_csv(t, path);
  auto u = load_trace(path);
  REQUIRE(u.qubit_ids == t.qubit_ids);
  REQUIRE(u.generation == t.generation);
  std::remove(path.c_str());
}

TEST_CASE("malformed trace files give structured errors") {
  const auto path = temp_path("radqec_bad_trace.qpt");

  {
    std::ofstream out(path);
    out << "{not json\n";
  }
  CHECK_THROWS_AS(load_trace(path), TraceParseError);

  {
    // Ragged record: one sample missing on the second row.
    auto t = random_trace(5, 2, 10);
    save_trace(t, path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    in.close();
    all = all.substr(0, all.rfind(' '));
    std::ofstream out(path);
    out << all << "\n";
  }
  CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("samples"));

  {
    // Non-uniform CSV grid.
    std::ofstream out(path);
    out << "time_us,d0\n0,1\n1,1\n2.5,1\n";
  }
  CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring("uniform"));

  {
    // Bad float with line context.
    std::ofstream out(path);
    out << "time_us,d0\n0,1\n1,xyz\n";
  }
  CHECK_THROWS_WITH(load_trace(path), Catch::Matchers::ContainsSubstring(":3"));

  std::remove(path.c_str());
}
