#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radqec/qp_dynamics.hpp"

namespace radqec {

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

namespace detail {

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& path,
                           std::size_t line) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end) {
    throw TraceParseError(path, line, "bad float '" + tok + "'");
  }
  return v;
}

} // namespace detail

// Native trace format ("qpt"): one JSON header line describing the uniform
// grid (in us) and metadata, then one whitespace-separated record per qubit:
//   <qubit_id> g0 g1 ... g[len-1]
// All floats carry 17 significant digits so a save/load round trip is
// bit-exact.
inline void save_trace(const QpTrace& trace, const std::string& path) {
  trace.validate();
  nlohmann::ordered_json header;
  header["format"] = "qpt-1";
  header["time_unit"] = "us";
  header["grid_start"] = trace.time_s.front() * kSToUs;
  header["grid_step"] = trace.step_s() * kSToUs;
  header["grid_len"] = trace.samples();
  header["qubit_ids"] = trace.qubit_ids;
  header["metadata"] = {
      {"strike_mm", {trace.meta.strike_mm_x, trace.meta.strike_mm_y}},
      {"chip_mm", trace.meta.chip_mm},
      {"mitigation_um", trace.meta.mitigation_um},
      {"synthetic", trace.meta.synthetic},
      {"comment", trace.meta.comment}};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace: cannot open " + path);
  out << header.dump() << "\n";
  for (std::size_t q = 0; q < trace.qubits(); ++q) {
    out << trace.qubit_ids[q];
    for (double g : trace.generation[q]) out << ' ' << detail::format_g17(g);
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_trace: write failed for " + path);
}

namespace detail {

inline QpTrace load_trace_native(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw TraceParseError(path, 1, "empty file");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceParseError(path, 1, std::string("header: ") + e.what());
  }

  QpTrace trace;
  double start_us, step_us;
  std::size_t len;
  try {
    start_us = header.at("grid_start").get<double>();
    step_us = header.at("grid_step").get<double>();
    len = header.at("grid_len").get<std::size_t>();
    trace.qubit_ids = header.at("qubit_ids").get<std::vector<std::string>>();
    if (header.contains("metadata")) {
      const auto& m = header["metadata"];
      if (m.contains("strike_mm")) {
        trace.meta.strike_mm_x = m["strike_mm"][0].get<double>();
        trace.meta.strike_mm_y = m["strike_mm"][1].get<double>();
      }
      if (m.contains("chip_mm")) trace.meta.chip_mm = m["chip_mm"].get<double>();
      if (m.contains("mitigation_um")) {
        trace.meta.mitigation_um = m["mitigation_um"].get<double>();
      }
      if (m.contains("synthetic")) trace.meta.synthetic = m["synthetic"].get<bool>();
      if (m.contains("comment")) trace.meta.comment = m["comment"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw TraceParseError(path, 1, std::string("header field: ") + e.what());
  }
  if (len < 2) throw TraceParseError(path, 1, "grid_len must be >= 2");
  if (!(step_us > 0)) throw TraceParseError(path, 1, "grid_step must be > 0");

  trace.time_s.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    trace.time_s[i] = (start_us + double(i) * step_us) * kUsToS;
  }

  trace.generation.assign(trace.qubit_ids.size(), {});
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= trace.qubit_ids.size()) {
      throw TraceParseError(path, lineno, "more records than qubit ids");
    }
    std::istringstream ss(line);
    std::string id;
    ss >> id;
    if (id != trace.qubit_ids[row]) {
      throw TraceParseError(path, lineno, "record id '" + id +
                                              "' does not match header id '" +
                                              trace.qubit_ids[row] + "'");
    }
    auto& g = trace.generation[row];
    g.reserve(len);
    std::string tok;
    while (ss >> tok) g.push_back(parse_double(tok, path, lineno));
    if (g.size() != len) {
      throw TraceParseError(path, lineno,
                            "record has " + std::to_string(g.size()) +
                                " samples, expected " + std::to_string(len));
    }
    ++row;
  }
  if (row != trace.qubit_ids.size()) {
    throw TraceParseError(path, lineno, "missing records: got " +
                                            std::to_string(row) + " of " +
                                            std::to_string(trace.qubit_ids.size()));
  }
  trace.validate();
  return trace;
}

// Columnar CSV variant: header "time_us,<id0>,<id1>,..." then one row per
// sample. Column 0 is the time in us, columns 1..n are g_qp per qubit.
inline QpTrace load_trace_csv(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw TraceParseError(path, 1, "empty file");

  QpTrace trace;
  {
    std::istringstream ss(line);
    std::string col;
    bool first = true;
    while (std::getline(ss, col, ',')) {
      if (first) {
        first = false;
        continue; // time column label
      }
      trace.qubit_ids.push_back(col);
    }
  }
  if (trace.qubit_ids.empty()) throw TraceParseError(path, 1, "no qubit columns");
  trace.generation.assign(trace.qubit_ids.size(), {});

  std::vector<double> times_us;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::size_t col = 0;
    while (std::getline(ss, tok, ',')) {
      const double v = parse_double(tok, path, lineno);
      if (col == 0) {
        times_us.push_back(v);
      } else if (col <= trace.qubit_ids.size()) {
        trace.generation[col - 1].push_back(v);
      } else {
        throw TraceParseError(path, lineno, "too many columns");
      }
      ++col;
    }
    if (col != trace.qubit_ids.size() + 1) {
      throw TraceParseError(path, lineno,
                            "row has " + std::to_string(col) + " columns, expected " +
                                std::to_string(trace.qubit_ids.size() + 1));
    }
  }
  if (times_us.size() < 2) throw TraceParseError(path, lineno, "need >= 2 samples");

  const double step = times_us[1] - times_us[0];
  if (!(step > 0)) throw TraceParseError(path, 2, "grid not increasing");
  for (std::size_t i = 1; i < times_us.size(); ++i) {
    if (std::abs((times_us[i] - times_us[i - 1]) - step) > 1e-9 * step) {
      throw TraceParseError(path, i + 2, "grid not uniform");
    }
  }
  trace.time_s.resize(times_us.size());
  for (std::size_t i = 0; i < times_us.size(); ++i) {
    trace.time_s[i] = times_us[i] * kUsToS;
  }
  trace.validate();
  return trace;
}

} // namespace detail

inline QpTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_trace: cannot open " + path);
  const int first = in.peek();
  if (first == '{') return detail::load_trace_native(in, path);
  return detail::load_trace_csv(in, path);
}

inline void save_trace_csv(const QpTrace& trace, const std::string& path) {
  trace.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace_csv: cannot open " + path);
  out << "time_us";
  for (const auto& id : trace.qubit_ids) out << ',' << id;
  out << "\n";
  for (std::size_t i = 0; i < trace.samples(); ++i) {
    out << detail::format_g17(trace.time_s[i] * kSToUs);
    for (std::size_t q = 0; q < trace.qubits(); ++q) {
      out << ',' << detail::format_g17(trace.generation[q][i]);
    }
    out << "\n";
  }
}

} // namespace radqec
