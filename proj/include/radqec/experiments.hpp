#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radqec/coherence.hpp"
#include "radqec/decoder.hpp"
#include "radqec/pauli_sim.hpp"
#include "radqec/qp_dynamics.hpp"
#include "radqec/records.hpp"
#include "radqec/sobol.hpp"
#include "radqec/surface_code.hpp"
#include "radqec/trace_io.hpp"
#include "radqec/trajectory_sim.hpp"

namespace radqec {

// ---------------------------------------------------------------------------
// Estimators

struct WilsonInterval {
  double lo, hi;
};

inline WilsonInterval wilson_interval(int successes, int n, double z = 1.959963984540054) {
  if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
  const double phat = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct PlEstimate {
  int cycle = 0;
  int shots = 0;
  int failures = 0;
  int uncorrected_failures = 0;
  double p = 0.0;
  double lo = 0.0, hi = 0.0;
  double uncorrected_p = 0.0;
};

// Fraction of shots with logical verdict 1 for one terminal length, with a
// Wilson 95% interval. Decoding is shot-parallel and order-independent.
inline PlEstimate estimate_pl(const std::vector<SyndromeRecord>& records,
                              const DetectorGraph& graph,
                              const std::array<std::array<uint8_t, 9>, 4>& hz,
                              bool include_data_layer = true, int encoded = 0,
                              int threads = 1) {
  if (records.empty()) throw std::invalid_argument("estimate_pl: no shots");
  std::vector<uint8_t> verdicts(records.size()), raw(records.size());
  detail::parallel_shots(int(records.size()), threads, [&](int s) {
    const auto& r = records[std::size_t(s)];
    auto shot = decode_z_record(graph, hz, r.z_syndromes, r.data_bits,
                                include_data_layer, encoded);
    verdicts[std::size_t(s)] = uint8_t(shot.verdict);
    raw[std::size_t(s)] = uint8_t(shot.uncorrected);
  });
  PlEstimate est;
  est.cycle = int(records[0].n_cycles());
  est.shots = int(records.size());
  for (std::size_t s = 0; s < records.size(); ++s) {
    est.failures += verdicts[s];
    est.uncorrected_failures += raw[s];
  }
  est.p = double(est.failures) / est.shots;
  est.uncorrected_p = double(est.uncorrected_failures) / est.shots;
  const auto ci = wilson_interval(est.failures, est.shots);
  est.lo = ci.lo;
  est.hi = ci.hi;
  return est;
}

// p_L = (1 - prod_i (1 - 2 eps_i)) / 2.
inline double compose_pl(const std::vector<double>& epsilons) {
  double prod = 1.0;
  for (double e : epsilons) {
    if (!(e >= 0.0 && e <= 0.5)) {
      throw std::invalid_argument("compose_pl: epsilon outside [0, 0.5]");
    }
    prod *= 1.0 - 2.0 * e;
  }
  return 0.5 * (1.0 - prod);
}

struct Curve {
  std::vector<PlEstimate> points; // ascending terminal cycle
};

// Cycle-average of p_L(mu) - p_L(no-mu) over the simulated window. Uniform
// grids use the plain mean; non-uniform (subsampled) grids use the
// trapezoid average over the span.
inline double performance_gap(const Curve& mu, const Curve& nomu) {
  if (mu.points.size() != nomu.points.size() || mu.points.empty()) {
    throw std::invalid_argument("performance_gap: cycle grids differ");
  }
  const std::size_t n = mu.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.points[i].cycle != nomu.points[i].cycle) {
      throw std::invalid_argument("performance_gap: cycle grids differ");
    }
  }
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = mu.points[i].p - nomu.points[i].p;
  if (n == 1) return diff[0];

  bool uniform = true;
  const int step = mu.points[1].cycle - mu.points[0].cycle;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (mu.points[i + 1].cycle - mu.points[i].cycle != step) uniform = false;
  }
  if (uniform) {
    double acc = 0.0;
    for (double d : diff) acc += d;
    return acc / double(n);
  }
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double w = mu.points[i + 1].cycle - mu.points[i].cycle;
    integral += 0.5 * (diff[i] + diff[i + 1]) * w;
  }
  return integral / double(mu.points.back().cycle - mu.points.front().cycle);
}

// Binomial standard error of the gap under the same averaging weights.
inline double performance_gap_se(const Curve& mu, const Curve& nomu) {
  const std::size_t n = mu.points.size();
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = [](const PlEstimate& e) {
      return e.p * (1.0 - e.p) / std::max(e.shots, 1);
    };
    var += (v(mu.points[i]) + v(nomu.points[i])) / double(n * n);
  }
  return std::sqrt(var);
}

// delta zeta_c(t) = [zeta_c(t) - zeta_c(0)] / zeta_c(0) per mitigation level,
// with level 0 the unmitigated reference.
inline std::vector<double> relative_efficacy(const std::vector<double>& zeta_by_level) {
  if (zeta_by_level.empty()) throw std::invalid_argument("relative_efficacy: empty");
  const double z0 = zeta_by_level[0];
  if (z0 == 0.0) {
    throw std::invalid_argument("relative_efficacy: zeta_c(0) = 0, ratio undefined");
  }
  std::vector<double> out(zeta_by_level.size());
  for (std::size_t i = 0; i < zeta_by_level.size(); ++i) {
    out[i] = (zeta_by_level[i] - z0) / z0;
  }
  return out;
}

// First `count` points of the 2-D Sobol sequence affinely scaled to the chip
// rectangle; deterministic and seed-free.
inline std::vector<std::pair<double, double>> sobol_strikes(int count, double chip_x_mm,
                                                            double chip_y_mm) {
  if (count < 1) throw std::invalid_argument("sobol_strikes: count must be >= 1");
  Sobol2D seq;
  std::vector<std::pair<double, double>> out;
  out.reserve(std::size_t(count));
  for (int i = 1; i <= count; ++i) {
    const auto p = seq.point(uint64_t(i));
    out.push_back({p[0] * chip_x_mm, p[1] * chip_y_mm});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  TransmonParams transmon;
  GateTimes gates;
  double cycle_us = 1.0;
  QpRates qp_rates;
  double gap_uev = 191.0;
  double econ_ev = 11.3;
  std::optional<double> ncp_um3; // overrides the formula when set

  double spacing_scale = 1.0;
  std::optional<double> strike_mm_x; // defaults to the scaled layout strike
  std::optional<double> strike_mm_y;

  std::string trace_source = "synthetic"; // "synthetic" | "file" | "none"
  std::string trace_path;
  SynthParams synth;

  int shots = 1024;
  int cycles = 200;
  int protocol = 1;
  uint64_t seed = 1;
  std::string lengths = "geometric:24"; // "all" | "geometric:K" | "list:a,b,c"
  int threads = 0;                      // 0 = hardware concurrency
  std::string engine = "frame";         // "frame" | "gad"
  double p0 = 1.0, p1 = 0.0;
  bool protocol2_data_layer = false;
  bool noisy_reset = false;

  double ncp() const {
    return ncp_um3 ? *ncp_um3 : compute_ncp(gap_uev, econ_ev);
  }
  int effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 2;
  }
};

inline void to_json(nlohmann::ordered_json& j, const RunConfig& c) {
  j = nlohmann::ordered_json{
      {"transmon",
       {{"omega01_ghz", c.transmon.omega01_rad_s / (2.0 * kPi * 1e9)},
        {"ec_ghz", c.transmon.ec_hz / 1e9},
        {"ej_ghz", c.transmon.ej_hz / 1e9},
        {"gap_al_uev", c.transmon.gap_al_uev},
        {"t1_base_us", c.transmon.t1_base_s * 1e6},
        {"t2_base_us", c.transmon.t2_base_s * 1e6},
        {"gamma_phi_base_hz", c.transmon.gamma_phi_base}}},
      {"gates",
       {{"cx_ns", c.gates.cx_ns}, {"h_ns", c.gates.h_ns}, {"readout_ns", c.gates.readout_ns}}},
      {"cycle_us", c.cycle_us},
      {"qp",
       {{"recombination_per_us", c.qp_rates.recombination},
        {"decay_per_us", c.qp_rates.decay},
        {"gap_uev", c.gap_uev},
        {"econ_ev", c.econ_ev}}},
      {"layout", {{"spacing_scale", c.spacing_scale}}},
      {"trace",
       {{"source", c.trace_source},
        {"path", c.trace_path},
        {"synth",
         {{"amplitude", c.synth.amplitude},
          {"lambda_mm", c.synth.lambda_mm},
          {"strike_time_us", c.synth.strike_time_us},
          {"rise_us", c.synth.rise_us},
          {"fall_fast_us", c.synth.fall_fast_us},
          {"fall_slow_us", c.synth.fall_slow_us},
          {"slow_fraction", c.synth.slow_fraction},
          {"mitigation_um", c.synth.mitigation_um},
          {"mitigation_exponent", c.synth.mitigation_exponent},
          {"amp_suppression", c.synth.amp_suppression},
          {"lambda_shrink", c.synth.lambda_shrink},
          {"tail_shrink", c.synth.tail_shrink},
          {"duration_us", c.synth.duration_us},
          {"step_us", c.synth.step_us},
          {"jitter_frac", c.synth.jitter_frac},
          {"seed", c.synth.seed}}}}},
      {"run",
       {{"shots", c.shots},
        {"cycles", c.cycles},
        {"protocol", c.protocol},
        {"seed", c.seed},
        {"lengths", c.lengths},
        {"threads", c.threads},
        {"engine", c.engine}}},
      {"noise",
       {{"p0", c.p0},
        {"p1", c.p1},
        {"protocol2_data_layer", c.protocol2_data_layer},
        {"noisy_reset", c.noisy_reset}}}};
  if (c.ncp_um3) j["qp"]["ncp_um3"] = *c.ncp_um3;
  if (c.strike_mm_x) j["layout"]["strike_mm"] = {*c.strike_mm_x, *c.strike_mm_y};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  if (j.contains("transmon")) {
    const auto& t = j["transmon"];
    if (t.contains("omega01_ghz")) {
      c.transmon.omega01_rad_s = t["omega01_ghz"].get<double>() * 2.0 * kPi * 1e9;
    }
    if (t.contains("ec_ghz")) c.transmon.ec_hz = t["ec_ghz"].get<double>() * 1e9;
    if (t.contains("ej_ghz")) c.transmon.ej_hz = t["ej_ghz"].get<double>() * 1e9;
    if (t.contains("gap_al_uev")) c.transmon.gap_al_uev = t["gap_al_uev"].get<double>();
    if (t.contains("t1_base_us")) c.transmon.t1_base_s = t["t1_base_us"].get<double>() * 1e-6;
    if (t.contains("t2_base_us")) c.transmon.t2_base_s = t["t2_base_us"].get<double>() * 1e-6;
    if (t.contains("gamma_phi_base_hz")) {
      c.transmon.gamma_phi_base = t["gamma_phi_base_hz"].get<double>();
    }
  }
  if (j.contains("gates")) {
    const auto& g = j["gates"];
    if (g.contains("cx_ns")) c.gates.cx_ns = g["cx_ns"].get<double>();
    if (g.contains("h_ns")) c.gates.h_ns = g["h_ns"].get<double>();
    if (g.contains("readout_ns")) c.gates.readout_ns = g["readout_ns"].get<double>();
  }
  if (j.contains("cycle_us")) c.cycle_us = j["cycle_us"].get<double>();
  if (j.contains("qp")) {
    const auto& q = j["qp"];
    if (q.contains("recombination_per_us")) {
      c.qp_rates.recombination = q["recombination_per_us"].get<double>();
    }
    if (q.contains("decay_per_us")) c.qp_rates.decay = q["decay_per_us"].get<double>();
    if (q.contains("gap_uev")) c.gap_uev = q["gap_uev"].get<double>();
    if (q.contains("econ_ev")) c.econ_ev = q["econ_ev"].get<double>();
    if (q.contains("ncp_um3")) c.ncp_um3 = q["ncp_um3"].get<double>();
  }
  if (j.contains("layout")) {
    const auto& l = j["layout"];
    if (l.contains("spacing_scale")) c.spacing_scale = l["spacing_scale"].get<double>();
    if (l.contains("strike_mm")) {
      c.strike_mm_x = l["strike_mm"][0].get<double>();
      c.strike_mm_y = l["strike_mm"][1].get<double>();
    }
  }
  if (j.contains("trace")) {
    const auto& t = j["trace"];
    if (t.contains("source")) c.trace_source = t["source"].get<std::string>();
    if (t.contains("path")) c.trace_path = t["path"].get<std::string>();
    if (t.contains("synth")) {
      const auto& s = t["synth"];
      auto get = [&](const char* k, double& dst) {
        if (s.contains(k)) dst = s[k].get<double>();
      };
      get("amplitude", c.synth.amplitude);
      get("lambda_mm", c.synth.lambda_mm);
      get("strike_time_us", c.synth.strike_time_us);
      get("rise_us", c.synth.rise_us);
      get("fall_fast_us", c.synth.fall_fast_us);
      get("fall_slow_us", c.synth.fall_slow_us);
      get("slow_fraction", c.synth.slow_fraction);
      get("mitigation_um", c.synth.mitigation_um);
      get("mitigation_exponent", c.synth.mitigation_exponent);
      get("amp_suppression", c.synth.amp_suppression);
      get("lambda_shrink", c.synth.lambda_shrink);
      get("tail_shrink", c.synth.tail_shrink);
      get("duration_us", c.synth.duration_us);
      get("step_us", c.synth.step_us);
      get("jitter_frac", c.synth.jitter_frac);
      if (s.contains("seed")) c.synth.seed = s["seed"].get<uint64_t>();
    }
  }
  if (j.contains("run")) {
    const auto& r = j["run"];
    if (r.contains("shots")) c.shots = r["shots"].get<int>();
    if (r.contains("cycles")) c.cycles = r["cycles"].get<int>();
    if (r.contains("protocol")) c.protocol = r["protocol"].get<int>();
    if (r.contains("seed")) c.seed = r["seed"].get<uint64_t>();
    if (r.contains("lengths")) c.lengths = r["lengths"].get<std::string>();
    if (r.contains("threads")) c.threads = r["threads"].get<int>();
    if (r.contains("engine")) c.engine = r["engine"].get<std::string>();
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (n.contains("p0")) c.p0 = n["p0"].get<double>();
    if (n.contains("p1")) c.p1 = n["p1"].get<double>();
    if (n.contains("protocol2_data_layer")) {
      c.protocol2_data_layer = n["protocol2_data_layer"].get<bool>();
    }
    if (n.contains("noisy_reset")) c.noisy_reset = n["noisy_reset"].get<bool>();
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  RunConfig c;
  from_json(j, c);
  return c;
}

// Terminal-length grid: "all", "geometric:K", or "list:a,b,c".
inline std::vector<int> terminal_lengths(const std::string& spec, int n_cycles) {
  std::vector<int> out;
  if (spec == "all") {
    for (int i = 1; i <= n_cycles; ++i) out.push_back(i);
    return out;
  }
  if (spec.rfind("geometric:", 0) == 0) {
    const int k = std::stoi(spec.substr(10));
    if (k < 2) throw std::invalid_argument("terminal_lengths: need >= 2 points");
    for (int i = 0; i < k; ++i) {
      const double f = double(i) / (k - 1);
      const int n = int(std::lround(std::pow(double(n_cycles), f)));
      out.push_back(std::clamp(n, 1, n_cycles));
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  if (spec.rfind("list:", 0) == 0) {
    std::istringstream ss(spec.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const int n = std::stoi(tok);
      if (n < 1 || n > n_cycles) {
        throw std::invalid_argument("terminal_lengths: length outside [1, cycles]");
      }
      out.push_back(n);
    }
    if (out.empty()) throw std::invalid_argument("terminal_lengths: empty list");
    return out;
  }
  throw std::invalid_argument("terminal_lengths: bad spec '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Pipeline pieces

struct Experiment {
  CodeLayout layout;
  StabilizerCircuit circuit;
  DetectorGraph graph;
  std::array<std::array<uint8_t, 9>, 4> hz;

  static Experiment from_config(const RunConfig& c) {
    Experiment e{build_layout(c.spacing_scale),
                 StabilizerCircuit{},
                 DetectorGraph::from_parity(parity_matrices().hz),
                 parity_matrices().hz};
    e.circuit = build_cycle_circuit(e.layout, c.gates, c.cycle_us * 1000.0);
    return e;
  }
};

// Schedule from a trace (or baseline when trace_source is "none"). Schedules
// shorter than the run are extended by repeating the final cycle entry.
inline CoherenceSchedule schedule_from_config(const RunConfig& c, const Experiment& e,
                                              const QpTrace* trace) {
  const std::vector<TransmonParams> params(kNumQubits, c.transmon);
  if (!trace) {
    return baseline_schedule(c.transmon, kNumQubits, std::size_t(c.cycles),
                             c.cycle_us * 1e-6);
  }
  const auto density = integrate_qp(*trace, c.qp_rates, c.ncp());
  auto sched = build_schedule(density, params, c.cycle_us * 1e-6);
  while (sched.cycles.size() < std::size_t(c.cycles)) {
    sched.cycles.push_back(sched.cycles.back());
  }
  return sched;
}

inline QpTrace trace_from_config(const RunConfig& c, const Experiment& e) {
  if (c.trace_source == "file") {
    if (c.trace_path.empty()) throw std::invalid_argument("trace: no path given");
    return load_trace(c.trace_path);
  }
  if (c.trace_source != "synthetic") {
    throw std::invalid_argument("trace_from_config: source must be file|synthetic");
  }
  SynthParams p = c.synth;
  p.chip_mm = e.layout.chip_mm;
  p.strike_mm_x = c.strike_mm_x.value_or(e.layout.default_strike_x());
  p.strike_mm_y = c.strike_mm_y.value_or(e.layout.default_strike_y());
  return synthesize_trace(e.layout.pos_mm, e.layout.qubit_ids, p);
}

// Protocol-I p_L(n) curve over the terminal-length grid.
inline Curve run_curve(const RunConfig& c, const Experiment& e,
                       const CoherenceSchedule& schedule) {
  const auto lengths = terminal_lengths(c.lengths, c.cycles);
  const int threads = c.effective_threads();
  Curve curve;
  for (int n : lengths) {
    std::vector<SyndromeRecord> records;
    if (c.engine == "gad") {
      TrajectoryOptions opt;
      opt.p0 = c.p0;
      opt.p1 = c.p1;
      opt.threads = threads;
      records = run_gad_protocol_I(e.circuit, schedule, n, c.shots, CounterRng(c.seed), opt);
    } else {
      SimOptions opt;
      opt.threads = threads;
      opt.noisy_reset = c.noisy_reset;
      records = run_protocol_I(e.circuit, schedule, n, c.shots, CounterRng(c.seed), opt);
    }
    curve.points.push_back(estimate_pl(records, e.graph, e.hz, true, 0, threads));
  }
  return curve;
}

// Protocol-II p_L(epsilon) curve on the same grid via the composition rule.
inline Curve run_protocol2_curve(const RunConfig& c, const Experiment& e,
                                 const CoherenceSchedule& schedule) {
  ProtocolIIOptions opt;
  opt.include_data_layer = c.protocol2_data_layer;
  opt.sim.threads = c.effective_threads();
  opt.sim.noisy_reset = c.noisy_reset;
  auto est = run_protocol_II(e.circuit, schedule, e.graph, c.cycles, c.shots,
                             CounterRng(c.seed), opt);
  Curve curve;
  for (int n : terminal_lengths(c.lengths, c.cycles)) {
    std::vector<double> eps(est.eps.begin(), est.eps.begin() + n);
    for (double& x : eps) x = std::min(x, 0.5);
    PlEstimate pt;
    pt.cycle = n;
    pt.shots = est.shots;
    pt.p = compose_pl(eps);
    const auto ci = wilson_interval(int(std::lround(pt.p * est.shots)), est.shots);
    pt.lo = ci.lo;
    pt.hi = ci.hi;
    curve.points.push_back(pt);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Reports

struct GapReport {
  Curve mu;
  Curve nomu;
  double zeta_c = 0.0;
  double zeta_se = 0.0;
  uint64_t seed = 0;
  uint64_t circuit_hash = 0;
  uint64_t schedule_hash = 0;
};

inline uint64_t hash_schedule(const CoherenceSchedule& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(&s.cycle_s, sizeof(double), h);
  for (const auto& row : s.cycles) {
    h = fnv1a(row.data(), row.size() * sizeof(Coherence), h);
  }
  return h;
}

inline GapReport run_gap(const RunConfig& c) {
  Experiment e = Experiment::from_config(c);
  const QpTrace trace = trace_from_config(c, e);
  const auto mu_sched = schedule_from_config(c, e, &trace);
  const auto nomu_sched = schedule_from_config(c, e, nullptr);

  GapReport rep;
  rep.mu = run_curve(c, e, mu_sched);
  rep.nomu = run_curve(c, e, nomu_sched);
  rep.zeta_c = performance_gap(rep.mu, rep.nomu);
  rep.zeta_se = performance_gap_se(rep.mu, rep.nomu);
  rep.seed = c.seed;
  const std::string gates = export_gate_list(e.circuit);
  rep.circuit_hash = fnv1a(gates.data(), gates.size());
  rep.schedule_hash = hash_schedule(mu_sched);
  return rep;
}

// Long-form CSV: cycle, curve, value, ci_lo, ci_hi (plus shot bookkeeping).
inline void write_curves_csv(const GapReport& rep, std::ostream& out) {
  out << "cycle,curve,value,ci_lo,ci_hi,failures,shots\n";
  char buf[160];
  auto emit = [&](const Curve& c, const char* tag) {
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%.17g,%d,%d\n", p.cycle, tag,
                    p.p, p.lo, p.hi, p.failures, p.shots);
      out << buf;
      std::snprintf(buf, sizeof(buf), "%d,%s_uncorrected,%.17g,,,%d,%d\n", p.cycle, tag,
                    p.uncorrected_p, p.uncorrected_failures, p.shots);
      out << buf;
    }
  };
  emit(rep.mu, "mu");
  emit(rep.nomu, "nomu");
}

inline nlohmann::ordered_json report_json(const RunConfig& c, const GapReport& rep) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  // Execution details (thread count) are normalized out so that reports are
  // byte-identical regardless of how the work was scheduled.
  RunConfig echo = c;
  echo.threads = 0;
  to_json(cfg, echo);
  j["config"] = cfg;
  j["zeta_c"] = rep.zeta_c;
  j["zeta_se"] = rep.zeta_se;
  j["manifest"] = {{"seed", rep.seed},
                   {"circuit_hash", rep.circuit_hash},
                   {"schedule_hash", rep.schedule_hash}};
  auto curve_to_json = [](const Curve& curve) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : curve.points) {
      arr.push_back({{"cycle", p.cycle},
                     {"p", p.p},
                     {"ci", {p.lo, p.hi}},
                     {"failures", p.failures},
                     {"uncorrected_p", p.uncorrected_p},
                     {"shots", p.shots}});
    }
    return arr;
  };
  j["mu"] = curve_to_json(rep.mu);
  j["nomu"] = curve_to_json(rep.nomu);
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepCell {
  double mitigation_um = 0.0;
  double spacing_scale = 1.0;
  std::vector<double> zeta_per_strike;
  double zeta_mean = 0.0;
  double zeta_std = 0.0;
  std::string error; // per-cell failures are isolated, not fatal
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<double> mitigation_levels;
  std::vector<double> spacing_scales;
};

struct SweepConfig {
  RunConfig base;
  std::vector<double> mitigation_levels_um = {0.0, 0.2, 0.5, 2.0, 13.0};
  std::vector<double> spacing_scales = {1.0};
  int n_strikes = 1; // > 1 selects a Sobol ensemble over the chip
};

inline SweepResult run_sweep(const SweepConfig& sc) {
  SweepResult result;
  result.mitigation_levels = sc.mitigation_levels_um;
  result.spacing_scales = sc.spacing_scales;
  for (double scale : sc.spacing_scales) {
    // Baseline curve is strike-free: once per spacing scale.
    RunConfig base = sc.base;
    base.spacing_scale = scale;
    Experiment e = Experiment::from_config(base);
    Curve nomu;
    try {
      nomu = run_curve(base, e, schedule_from_config(base, e, nullptr));
    } catch (const std::exception& ex) {
      for (double level : sc.mitigation_levels_um) {
        SweepCell cell;
        cell.mitigation_um = level;
        cell.spacing_scale = scale;
        cell.error = ex.what();
        result.cells.push_back(cell);
      }
      continue;
    }
    std::vector<std::pair<double, double>> strikes;
    if (sc.n_strikes > 1) {
      strikes = sobol_strikes(sc.n_strikes, e.layout.chip_mm, e.layout.chip_mm);
    } else {
      strikes = {{e.layout.default_strike_x(), e.layout.default_strike_y()}};
    }
    for (double level : sc.mitigation_levels_um) {
      SweepCell cell;
      cell.mitigation_um = level;
      cell.spacing_scale = scale;
      try {
        for (const auto& strike : strikes) {
          RunConfig c = base;
          c.synth.mitigation_um = level;
          c.strike_mm_x = strike.first;
          c.strike_mm_y = strike.second;
          const QpTrace trace = trace_from_config(c, e);
          const Curve mu = run_curve(c, e, schedule_from_config(c, e, &trace));
          cell.zeta_per_strike.push_back(performance_gap(mu, nomu));
        }
        double mean = 0.0;
        for (double z : cell.zeta_per_strike) mean += z;
        mean /= double(cell.zeta_per_strike.size());
        double var = 0.0;
        for (double z : cell.zeta_per_strike) var += (z - mean) * (z - mean);
        cell.zeta_mean = mean;
        cell.zeta_std = cell.zeta_per_strike.size() > 1
                            ? std::sqrt(var / double(cell.zeta_per_strike.size() - 1))
                            : 0.0;
      } catch (const std::exception& ex) {
        cell.error = ex.what();
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

// Plot-ready sweep summary: one row per cell.
inline void write_sweep_csv(const SweepResult& r, std::ostream& out) {
  out << "mitigation_um,spacing_scale,zeta_mean,zeta_std,n_strikes,error\n";
  char buf[160];
  for (const auto& cell : r.cells) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%zu,%s\n",
                  cell.mitigation_um, cell.spacing_scale, cell.zeta_mean,
                  cell.zeta_std, cell.zeta_per_strike.size(), cell.error.c_str());
    out << buf;
  }
}

inline nlohmann::ordered_json sweep_json(const SweepConfig& sc, const SweepResult& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  RunConfig echo = sc.base;
  echo.threads = 0;
  to_json(cfg, echo);
  j["config"] = cfg;
  j["mitigation_levels_um"] = sc.mitigation_levels_um;
  j["spacing_scales"] = sc.spacing_scales;
  j["n_strikes"] = sc.n_strikes;
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : r.cells) {
    j["cells"].push_back({{"mitigation_um", cell.mitigation_um},
                          {"spacing_scale", cell.spacing_scale},
                          {"zeta_mean", cell.zeta_mean},
                          {"zeta_std", cell.zeta_std},
                          {"zeta_per_strike", cell.zeta_per_strike},
                          {"error", cell.error}});
  }
  // Relative efficacy per spacing scale when the unmitigated cell exists.
  for (double scale : r.spacing_scales) {
    std::vector<double> zetas;
    for (double level : r.mitigation_levels) {
      for (const auto& cell : r.cells) {
        if (cell.spacing_scale == scale && cell.mitigation_um == level &&
            cell.error.empty()) {
          zetas.push_back(cell.zeta_mean);
        }
      }
    }
    if (zetas.size() == r.mitigation_levels.size() && !zetas.empty() && zetas[0] != 0.0) {
      j["relative_efficacy"][std::to_string(scale)] = relative_efficacy(zetas);
    }
  }
  return j;
}

} // namespace radqec
