#pragma once

// Key-value configuration files:
//
//   # comment
//   key = value
//
// Keys are unique; blank lines and '#' comments are ignored. Every value read
// through a getter (including defaults) is recorded for the report echo.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/core/errors.hpp"
#include "staticpot/static_potentials.hpp"

namespace staticpot {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

/// Shortest round-trip representation, so echoed values are stable.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>") {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (c.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      c.values_[key] = value;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Rejects keys outside `allowed`.
  void validate(const std::set<std::string>& allowed, const std::string& context) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' for " + context);
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    const std::string v = it == values_.end() ? def : it->second;
    echo_[key] = v;
    return v;
  }

  double get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    double v = def;
    if (it != values_.end()) v = to_double(key, it->second);
    echo_[key] = format_double(v);
    return v;
  }

  long get_int(const std::string& key, long def) const {
    const auto it = values_.find(key);
    long v = def;
    if (it != values_.end()) {
      std::size_t used = 0;
      try {
        v = std::stol(it->second, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != it->second.size() || it->second.empty())
        throw ConfigError("key '" + key + "' expects an integer, got '" + it->second + "'");
    }
    echo_[key] = std::to_string(v);
    return v;
  }

  bool get_bool(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    bool v = def;
    if (it != values_.end()) {
      if (it->second == "true" || it->second == "1")
        v = true;
      else if (it->second == "false" || it->second == "0")
        v = false;
      else
        throw ConfigError("key '" + key + "' expects true/false, got '" + it->second + "'");
    }
    echo_[key] = v ? "true" : "false";
    return v;
  }

  /// Comma-separated list of reals.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& def) const {
    const auto it = values_.find(key);
    std::vector<double> v = def;
    if (it != values_.end()) {
      v.clear();
      for (const auto& part : split(it->second, ',')) v.push_back(to_double(key, part));
    }
    std::string e;
    for (std::size_t i = 0; i < v.size(); ++i) e += (i ? "," : "") + format_double(v[i]);
    echo_[key] = e;
    return v;
  }

  /// Values actually consumed, keyed and sorted by name.
  const std::map<std::string, std::string>& echo() const { return echo_; }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("key '" + key + "' expects a number, got '" + s + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> echo_;
};

inline MetricFamily parse_family(const std::string& s) {
  if (s == "euclidean") return MetricFamily::Euclidean;
  if (s == "schwarzschild") return MetricFamily::SchwarzschildIsotropic;
  if (s == "perturbed_as") return MetricFamily::PerturbedAS;
  throw ConfigError("unknown metric family '" + s + "' (expected euclidean, schwarzschild or perturbed_as)");
}

/// "i,j,c,a,b; ..." with component indices i, j in 1..3 and angular indices
/// a, b in 0..3 (0 is the constant).
inline std::vector<PerturbationTerm> parse_perturbation(const std::string& s) {
  std::vector<PerturbationTerm> out;
  if (trim(s).empty()) return out;
  for (const auto& term : split(s, ';')) {
    if (term.empty()) continue;
    const auto f = split(term, ',');
    if (f.size() != 5) throw ConfigError("perturbation term '" + term + "' needs five fields i,j,c,a,b");
    try {
      PerturbationTerm t;
      t.i = std::stoi(f[0]) - 1;
      t.j = std::stoi(f[1]) - 1;
      t.coefficient = std::stod(f[2]);
      t.a = std::stoi(f[3]);
      t.b = std::stoi(f[4]);
      if (t.i < 0 || t.i > 2 || t.j < 0 || t.j > 2 || t.a < 0 || t.a > 3 || t.b < 0 || t.b > 3)
        throw ConfigError("perturbation term '" + term + "' has an index out of range");
      out.push_back(t);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("malformed perturbation term '" + term + "'");
    }
  }
  return out;
}

inline std::string format_perturbation(const std::vector<PerturbationTerm>& terms) {
  std::string s;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    s += (k ? "; " : "") + std::to_string(t.i + 1) + "," + std::to_string(t.j + 1) + "," + format_double(t.coefficient) +
         "," + std::to_string(t.a) + "," + std::to_string(t.b);
  }
  return s;
}

/// Keys read by metric_from_config.
inline const std::set<std::string>& metric_keys() {
  static const std::set<std::string> k{"metric.family", "metric.mass", "metric.tau", "metric.full_manifold",
                                       "metric.inner_radius", "metric.perturbation"};
  return k;
}

inline MetricSpec metric_from_config(const Config& cfg, const MetricSpec& def, const std::string& def_perturbation = "") {
  MetricSpec m;
  m.family = parse_family(cfg.get_string("metric.family", to_string(def.family)));
  m.mass = cfg.get_double("metric.mass", def.mass);
  m.tau = cfg.get_double("metric.tau", def.tau);
  if (m.family == MetricFamily::SchwarzschildIsotropic) m.full_manifold = cfg.get_bool("metric.full_manifold", def.full_manifold);
  if (m.family == MetricFamily::PerturbedAS) {
    m.inner_radius = cfg.get_double("metric.inner_radius", def.inner_radius);
    m.perturbation = parse_perturbation(cfg.get_string("metric.perturbation", def_perturbation));
  }
  return m;
}

/// "affine(a0,a1,a2,a3)", "schwarzschild_N(m)" or "custom(expression)".
inline PotentialField parse_potential(const std::string& spec) {
  const std::string s = trim(spec);
  const auto open = s.find('('), close = s.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != s.size())
    throw ConfigError("malformed potential '" + s + "'");
  const std::string name = trim(s.substr(0, open));
  const std::string args = s.substr(open + 1, close - open - 1);
  auto nums = [&](std::size_t n) {
    std::vector<double> v;
    for (const auto& a : split(args, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(a, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != a.size() || a.empty()) throw ConfigError("potential '" + s + "' has a non-numeric argument");
      v.push_back(x);
    }
    if (v.size() != n) throw ConfigError("potential '" + name + "' takes " + std::to_string(n) + " arguments");
    return v;
  };
  if (name == "affine") {
    const auto a = nums(4);
    return PotentialField::affine(a[0], a[1], a[2], a[3]);
  }
  if (name == "schwarzschild_N") return PotentialField::schwarzschild_N(nums(1)[0]);
  if (name == "custom") {
    try {
      return PotentialField::custom(args);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("custom potential: ") + e.what());
    }
  }
  throw ConfigError("unknown potential family '" + name + "'");
}

}  // namespace staticpot
