#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpl/ensemble.hpp"
#include "lpl/errors.hpp"
#include "lpl/experiment.hpp"

namespace lpl {

/// Floats in result files carry 6 significant digits with '.' as the
/// decimal separator, independent of any global locale.
inline std::string format_sig6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

inline SparsityRegime regime_from_name(const std::string& name) {
  if (name == "linear") return SparsityRegime::linear;
  if (name == "sublinear") return SparsityRegime::sublinear;
  if (name == "fractional_power") return SparsityRegime::fractional_power;
  throw ConfigError("unknown sparsity regime: " + name);
}

inline constexpr const char* kSweepCsvHeader =
    "p,regime,theta,s,n,lambda,trials,successes,p_hat,ci_lo,ci_hi,ambiguous";

namespace detail {

inline std::vector<SweepCell> sorted_cells(const SweepResult& result) {
  std::vector<SweepCell> cells = result.cells;
  std::sort(cells.begin(), cells.end(),
            [](const SweepCell& a, const SweepCell& b) {
              return a.p != b.p ? a.p < b.p : a.theta < b.theta;
            });
  return cells;
}

}  // namespace detail

/// Canonical CSV: pinned column order, rows sorted by (p, theta),
/// byte-stable for a given result.
inline std::string to_csv(const SweepResult& result) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const SweepCell& c : detail::sorted_cells(result)) {
    out += std::to_string(c.p);
    out += ',';
    out += regime_name(c.regime);
    out += ',';
    out += format_sig6(c.theta);
    out += ',';
    out += std::to_string(c.s);
    out += ',';
    out += std::to_string(c.n);
    out += ',';
    out += format_sig6(c.lambda);
    out += ',';
    out += std::to_string(c.trials);
    out += ',';
    out += std::to_string(c.successes);
    out += ',';
    out += format_sig6(c.p_hat);
    out += ',';
    out += format_sig6(c.ci_lo);
    out += ',';
    out += format_sig6(c.ci_hi);
    out += ',';
    out += std::to_string(c.ambiguous);
    out += '\n';
  }
  return out;
}

/// JSON lines mirror of the CSV: one object per row, identical keys and
/// number formatting, same ordering.
inline std::string to_jsonl(const SweepResult& result) {
  std::string out;
  for (const SweepCell& c : detail::sorted_cells(result)) {
    out += "{\"p\":" + std::to_string(c.p);
    out += ",\"regime\":\"" + regime_name(c.regime) + "\"";
    out += ",\"theta\":" + format_sig6(c.theta);
    out += ",\"s\":" + std::to_string(c.s);
    out += ",\"n\":" + std::to_string(c.n);
    out += ",\"lambda\":" + format_sig6(c.lambda);
    out += ",\"trials\":" + std::to_string(c.trials);
    out += ",\"successes\":" + std::to_string(c.successes);
    out += ",\"p_hat\":" + format_sig6(c.p_hat);
    out += ",\"ci_lo\":" + format_sig6(c.ci_lo);
    out += ",\"ci_hi\":" + format_sig6(c.ci_hi);
    out += ",\"ambiguous\":" + std::to_string(c.ambiguous);
    out += "}\n";
  }
  return out;
}

/// Parses JSONL produced by to_jsonl back into a result. Unknown keys are
/// rejected, so round trips are exact by construction.
inline SweepResult parse_jsonl(const std::string& text) {
  static const std::vector<std::string> keys = {
      "p",      "regime",    "theta", "s",     "n",     "lambda",
      "trials", "successes", "p_hat", "ci_lo", "ci_hi", "ambiguous"};
  SweepResult result;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("jsonl line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    for (const auto& item : row.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
        throw ConfigError("jsonl line " + std::to_string(line_no) +
                          ": unknown key '" + item.key() + "'");
    }
    for (const std::string& key : keys) {
      if (!row.contains(key))
        throw ConfigError("jsonl line " + std::to_string(line_no) +
                          ": missing key '" + key + "'");
    }
    SweepCell c;
    c.p = row["p"].get<int>();
    c.regime = regime_from_name(row["regime"].get<std::string>());
    c.theta = row["theta"].get<double>();
    c.s = row["s"].get<int>();
    c.n = row["n"].get<int>();
    c.lambda = row["lambda"].get<double>();
    c.trials = row["trials"].get<int>();
    c.successes = row["successes"].get<int>();
    c.p_hat = row["p_hat"].get<double>();
    c.ci_lo = row["ci_lo"].get<double>();
    c.ci_hi = row["ci_hi"].get<double>();
    c.ambiguous = row["ambiguous"].get<int>();
    result.cells.push_back(c);
  }
  return result;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace lpl
