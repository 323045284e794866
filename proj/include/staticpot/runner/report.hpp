#pragma once

// Suite reports (JSON) and plot tables (CSV). Requires the single-header json.hpp on
// the include path.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "staticpot/core/errors.hpp"
#include "staticpot/core/fit.hpp"
#include "staticpot/runner/config.hpp"

namespace staticpot {

/// How `computed` is compared with `expected`.
enum class Norm {
  Absolute,    // |computed - expected| <= tolerance
  Relative,    // |computed - expected| <= tolerance * |expected|
  UpperBound,  // computed <= tolerance (expected is ignored)
};

inline const char* to_string(Norm n) {
  switch (n) {
    case Norm::Absolute: return "absolute";
    case Norm::Relative: return "relative";
    case Norm::UpperBound: return "upper_bound";
  }
  return "unknown";
}

struct CheckRecord {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Norm norm = Norm::Absolute;
  bool pass = false;
  /// Error kind and message when the check raised; free-form detail otherwise.
  std::string message;
  /// Extra named values shown alongside the check.
  std::map<std::string, double> details;
};

inline bool evaluate_pass(double computed, double expected, double tolerance, Norm norm) {
  if (!std::isfinite(computed)) return false;
  switch (norm) {
    case Norm::Absolute: return std::abs(computed - expected) <= tolerance;
    case Norm::Relative: return std::abs(computed - expected) <= tolerance * std::abs(expected);
    case Norm::UpperBound: return computed <= tolerance;
  }
  return false;
}

inline CheckRecord make_check(std::string name, double computed, double expected, double tolerance, Norm norm,
                              std::string message = {}) {
  CheckRecord c;
  c.name = std::move(name);
  c.computed = computed;
  c.expected = expected;
  c.tolerance = tolerance;
  c.norm = norm;
  c.pass = evaluate_pass(computed, expected, tolerance, norm);
  c.message = std::move(message);
  return c;
}

inline CheckRecord failed_check(std::string name, const Error& e) {
  CheckRecord c;
  c.name = std::move(name);
  c.computed = std::numeric_limits<double>::quiet_NaN();
  c.pass = false;
  c.message = std::string(e.kind()) + ": " + e.what();
  return c;
}

struct SuiteReport {
  std::string suite;
  std::vector<CheckRecord> checks;
  std::map<std::string, std::string> config_echo;
  std::uint64_t seed = 0;
  /// Kept out of the JSON report so reports are reproducible byte for byte.
  double wall_time_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

namespace detail {

inline nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const SuiteReport& r) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["pass"] = r.all_pass();
  j["seed"] = r.seed;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["computed"] = detail::number(c.computed);
    cj["expected"] = detail::number(c.expected);
    cj["tolerance"] = detail::number(c.tolerance);
    cj["norm"] = to_string(c.norm);
    cj["pass"] = c.pass;
    if (!c.message.empty()) cj["message"] = c.message;
    if (!c.details.empty()) {
      auto& d = cj["details"] = nlohmann::ordered_json::object();
      for (const auto& [k, v] : c.details) d[k] = detail::number(v);
    }
    checks.push_back(cj);
  }
  auto& echo = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config_echo) echo[k] = v;
  return j;
}

/// Writes to a sibling temporary and renames it over the target.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline void write_report(const SuiteReport& r, const std::filesystem::path& dir) {
  write_atomically(dir / (r.suite + ".json"), to_json(r).dump(2) + "\n");
  nlohmann::ordered_json t;
  t["suite"] = r.suite;
  t["wall_time_seconds"] = r.wall_time_seconds;
  write_atomically(dir / (r.suite + ".timing.json"), t.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Plot tables

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t k = 0; k < t.header.size(); ++k) s += (k ? "," : "") + t.header[k];
  s += "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw IoError("table '" + t.name + "' has a row of the wrong width");
    for (std::size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + format_double(row[k]);
    s += "\n";
  }
  return s;
}

inline void emit_plot_data(const Table& t, const std::filesystem::path& dir) {
  if (t.header.empty()) throw IoError("table '" + t.name + "' has no columns");
  write_atomically(dir / (t.name + ".csv"), to_csv(t));
}

/// Columns x, y, log_x, log_|y|, slope; the fitted slope is repeated on every row.
inline Table loglog_table(std::string name, std::string xname, std::string yname, const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size()) throw IoError("log-log table '" + name + "' has mismatched columns");
  Table t{std::move(name), {xname, yname, "log_" + xname, "log_" + yname, "slope"}, {}};
  const double slope = x.size() >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < x.size(); ++i)
    t.rows.push_back({x[i], y[i], std::log(x[i]), std::log(std::abs(y[i])), slope});
  return t;
}

}  // namespace staticpot
