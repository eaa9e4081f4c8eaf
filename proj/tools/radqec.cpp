// Command-line front end: simulate / sweep / decode / trace / report.
// Every flag mirrors a config key; flags override values loaded from
// --config. Outputs are plot-ready CSV plus a machine-readable JSON report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "radqec/experiments.hpp"
#include "radqec/records.hpp"
#include "radqec/trace_io.hpp"

using namespace radqec;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> shots;
  std::optional<int> cycles;
  std::optional<int> protocol;
  std::optional<std::string> lengths;
  std::optional<int> threads;
  std::optional<std::string> engine;
  std::optional<double> scale;
  std::optional<double> mitigation;
  std::optional<std::string> trace_file;
  std::optional<double> strike_x, strike_y;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool require_run_flags) {
  cmd->add_option("--config", f.config_path, "JSON run configuration");
  auto* seed = cmd->add_option("--seed", f.seed, "RNG seed");
  auto* shots = cmd->add_option("--shots", f.shots, "shots per terminal length");
  auto* cycles = cmd->add_option("--cycles", f.cycles, "total cycles in the window");
  auto* protocol = cmd->add_option("--protocol", f.protocol, "1 = chained, 2 = unlinked")
                       ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--lengths", f.lengths, "terminal lengths: all | geometric:K | list:a,b");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_option("--engine", f.engine, "frame | gad")
      ->check(CLI::IsMember({"frame", "gad"}));
  cmd->add_option("--scale", f.scale, "qubit spacing scale (1, 2, 4)");
  cmd->add_option("--mitigation", f.mitigation, "downconversion film thickness in um");
  cmd->add_option("--trace", f.trace_file, "trace file path (otherwise synthetic)");
  cmd->add_option("--strike-x", f.strike_x, "strike x in mm");
  cmd->add_option("--strike-y", f.strike_y, "strike y in mm");
  if (require_run_flags) {
    seed->required();
    shots->required();
    cycles->required();
    protocol->required();
  }
}

RunConfig merge(const CommonFlags& f) {
  RunConfig c;
  if (!f.config_path.empty()) c = load_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.shots) c.shots = *f.shots;
  if (f.cycles) c.cycles = *f.cycles;
  if (f.protocol) c.protocol = *f.protocol;
  if (f.lengths) c.lengths = *f.lengths;
  if (f.threads) c.threads = *f.threads;
  if (f.engine) c.engine = *f.engine;
  if (f.scale) c.spacing_scale = *f.scale;
  if (f.mitigation) c.synth.mitigation_um = *f.mitigation;
  if (f.trace_file) {
    c.trace_source = "file";
    c.trace_path = *f.trace_file;
  }
  if (f.strike_x) c.strike_mm_x = *f.strike_x;
  if (f.strike_y) c.strike_mm_y = *f.strike_y;
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

int cmd_simulate(const CommonFlags& flags, const std::string& out_dir) {
  RunConfig c = merge(flags);
  std::filesystem::create_directories(out_dir);

  if (c.protocol == 2) {
    Experiment e = Experiment::from_config(c);
    const QpTrace trace = trace_from_config(c, e);
    const auto sched = schedule_from_config(c, e, &trace);
    const Curve curve = run_protocol2_curve(c, e, sched);
    std::ostringstream csv;
    csv << "cycle,curve,value,ci_lo,ci_hi,failures,shots\n";
    char buf[160];
    for (const auto& p : curve.points) {
      std::snprintf(buf, sizeof(buf), "%d,protocol2,%.17g,%.17g,%.17g,%d,%d\n", p.cycle,
                    p.p, p.lo, p.hi, p.failures, p.shots);
      csv << buf;
    }
    write_text(std::filesystem::path(out_dir) / "curves.csv", csv.str());
    nlohmann::ordered_json j;
    RunConfig echo = c;
    echo.threads = 0;
    nlohmann::ordered_json cfg;
    to_json(cfg, echo);
    j["config"] = cfg;
    j["protocol2_curve"] = nlohmann::ordered_json::array();
    for (const auto& p : curve.points) {
      j["protocol2_curve"].push_back({{"cycle", p.cycle}, {"p", p.p}});
    }
    write_text(std::filesystem::path(out_dir) / "report.json", j.dump(2) + "\n");
    std::cout << "protocol II curve written to " << out_dir << "\n";
    return 0;
  }

  const GapReport rep = run_gap(c);
  std::ostringstream csv;
  write_curves_csv(rep, csv);
  write_text(std::filesystem::path(out_dir) / "curves.csv", csv.str());
  write_text(std::filesystem::path(out_dir) / "report.json",
             report_json(c, rep).dump(2) + "\n");
  std::cout << "zeta_c = " << rep.zeta_c << " +- " << rep.zeta_se << "\n"
            << "report written to " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& out_dir,
              const std::vector<double>& levels, const std::vector<double>& scales,
              int strikes) {
  SweepConfig sc;
  sc.base = merge(flags);
  if (!levels.empty()) sc.mitigation_levels_um = levels;
  if (!scales.empty()) sc.spacing_scales = scales;
  sc.n_strikes = strikes;
  const SweepResult result = run_sweep(sc);

  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  write_sweep_csv(result, csv);
  write_text(std::filesystem::path(out_dir) / "sweep.csv", csv.str());
  write_text(std::filesystem::path(out_dir) / "sweep.json",
             sweep_json(sc, result).dump(2) + "\n");
  int failures = 0;
  for (const auto& cell : result.cells) {
    if (!cell.error.empty()) {
      ++failures;
      std::cerr << "cell (mitigation " << cell.mitigation_um << " um, scale "
                << cell.spacing_scale << ") failed: " << cell.error << "\n";
    }
  }
  std::cout << "sweep written to " << out_dir << " (" << result.cells.size()
            << " cells, " << failures << " failed)\n";
  return failures == 0 ? 0 : 2;
}

int cmd_decode(const std::string& records_path, const std::string& out_path,
               bool no_data_layer, int threads) {
  const auto records = load_records(records_path);
  auto graph = DetectorGraph::from_parity(parity_matrices().hz);
  const auto hz = parity_matrices().hz;
  std::vector<DecodedShot> shots(records.size());
  detail::parallel_shots(int(records.size()), threads > 0 ? threads : 2, [&](int s) {
    const auto& r = records[std::size_t(s)];
    shots[std::size_t(s)] =
        decode_z_record(graph, hz, r.z_syndromes, r.data_bits, !no_data_layer);
  });
  std::ostringstream out;
  out << "shot_id,verdict,uncorrected,correction_mask,match_weight\n";
  for (std::size_t s = 0; s < records.size(); ++s) {
    out << records[s].shot_id << ',' << shots[s].verdict << ',' << shots[s].uncorrected
        << ',' << shots[s].decode.correction << ',' << shots[s].decode.weight << "\n";
  }
  write_text(out_path, out.str());
  std::cout << "decoded " << records.size() << " shots -> " << out_path << "\n";
  return 0;
}

int cmd_trace_synth(const CommonFlags& flags, const std::string& out_path,
                    const SynthParams& overrides) {
  RunConfig c = merge(flags);
  c.synth.amplitude = overrides.amplitude;
  c.synth.lambda_mm = overrides.lambda_mm;
  c.synth.duration_us = overrides.duration_us;
  c.synth.step_us = overrides.step_us;
  if (flags.mitigation) c.synth.mitigation_um = *flags.mitigation;
  Experiment e = Experiment::from_config(c);
  const QpTrace trace = trace_from_config(c, e);
  save_trace(trace, out_path);
  std::cout << "synthetic trace (" << trace.qubits() << " qubits, "
            << trace.samples() << " samples) -> " << out_path << "\n";
  return 0;
}

int cmd_trace_validate(const std::string& path) {
  const QpTrace trace = load_trace(path);
  trace.validate();
  double peak = 0.0;
  for (const auto& row : trace.generation) {
    for (double v : row) peak = std::max(peak, v);
  }
  std::cout << "trace ok: " << trace.qubits() << " qubits, " << trace.samples()
            << " samples, step " << trace.step_s() * 1e6 << " us, peak g " << peak
            << " um^-3 us^-1, mitigation " << trace.meta.mitigation_um << " um"
            << (trace.meta.synthetic ? ", synthetic" : "") << "\n";
  return 0;
}

int cmd_report(const std::string& curves_path, const std::string& out_path) {
  std::ifstream in(curves_path);
  if (!in) throw std::runtime_error("cannot open " + curves_path);
  std::string line;
  std::getline(in, line); // header
  Curve mu, nomu;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cols;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (cols.size() < 7) continue;
    if (cols[1] != "mu" && cols[1] != "nomu") continue;
    PlEstimate p;
    p.cycle = std::stoi(cols[0]);
    p.p = std::stod(cols[2]);
    p.lo = std::stod(cols[3]);
    p.hi = std::stod(cols[4]);
    p.failures = std::stoi(cols[5]);
    p.shots = std::stoi(cols[6]);
    (cols[1] == "mu" ? mu : nomu).points.push_back(p);
  }
  const double zeta = performance_gap(mu, nomu);
  const double se = performance_gap_se(mu, nomu);
  nlohmann::ordered_json j;
  j["zeta_c"] = zeta;
  j["zeta_se"] = se;
  j["cycles"] = nlohmann::ordered_json::array();
  for (const auto& p : mu.points) j["cycles"].push_back(p.cycle);
  write_text(out_path, j.dump(2) + "\n");
  std::cout << "zeta_c = " << zeta << " +- " << se << " -> " << out_path << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"surface-code response to quasiparticle bursts"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir = "out";
  std::vector<double> levels, scales;
  int strikes = 1;
  std::string records_path, out_path, in_path;
  bool no_data_layer = false;
  int decode_threads = 0;
  SynthParams synth_overrides;

  auto* simulate = app.add_subcommand("simulate", "single run: p_L curves and zeta_c");
  add_common(simulate, flags, false);
  simulate->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "mitigation x spacing matrix");
  add_common(sweep, flags, false);
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--levels", levels, "mitigation thicknesses in um")->delimiter(',');
  sweep->add_option("--scales", scales, "spacing scales")->delimiter(',');
  sweep->add_option("--strikes", strikes, "Sobol ensemble size (1 = default strike)");

  auto* decode = app.add_subcommand("decode", "offline decode of stored records");
  decode->add_option("--records", records_path, "QSR1 record batch")->required();
  decode->add_option("--out", out_path, "verdict CSV")->required();
  decode->add_flag("--no-data-layer", no_data_layer, "drop the data-derived layer");
  decode->add_option("--threads", decode_threads, "worker threads");

  auto* trace = app.add_subcommand("trace", "trace tooling");
  trace->require_subcommand(1);
  auto* synth = trace->add_subcommand("synth", "emit a synthetic trace");
  add_common(synth, flags, false);
  synth->add_option("--out", out_path, "trace output path")->required();
  synth->add_option("--amplitude", synth_overrides.amplitude, "peak generation");
  synth->add_option("--lambda", synth_overrides.lambda_mm, "attenuation length mm");
  synth->add_option("--duration", synth_overrides.duration_us, "trace length us");
  synth->add_option("--step", synth_overrides.step_us, "grid step us");
  auto* validate = trace->add_subcommand("validate", "validate a trace file");
  validate->add_option("--in", in_path, "trace path")->required();

  auto* report = app.add_subcommand("report", "recompute zeta from stored curves");
  report->add_option("--curves", in_path, "curves.csv from simulate")->required();
  report->add_option("--out", out_path, "report JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(flags, out_dir);
    if (sweep->parsed()) return cmd_sweep(flags, out_dir, levels, scales, strikes);
    if (decode->parsed()) {
      return cmd_decode(records_path, out_path, no_data_layer, decode_threads);
    }
    if (trace->parsed()) {
      if (synth->parsed()) return cmd_trace_synth(flags, out_path, synth_overrides);
      if (validate->parsed()) return cmd_trace_validate(in_path);
    }
    if (report->parsed()) return cmd_report(in_path, out_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
