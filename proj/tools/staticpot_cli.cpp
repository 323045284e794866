// Command-line entry point.
//
//   staticpot verify <suite> [--config FILE] --out DIR [--parallel] [--seed N]
//   staticpot list-suites
//   staticpot dump-curvature --metric SPEC --points FILE [--backend dual|fd]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "staticpot/runner/suites.hpp"
#include "staticpot/pointwise_identities.hpp"

namespace sp = staticpot;

namespace {

constexpr int kPass = 0, kFail = 1, kConfig = 2;

int cmd_verify(const std::string& suite, const std::string& config_path, const std::string& out_dir, bool parallel,
               std::optional<std::uint64_t> seed_arg) {
  const auto& def = sp::find_suite(suite);
  sp::Config cfg = config_path.empty() ? sp::Config{} : sp::Config::load(config_path);
  std::uint64_t seed = 1;
  if (cfg.has("seed")) seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  if (seed_arg) seed = *seed_arg;
  const auto run = sp::run_suite(def, cfg, seed, parallel);
  sp::write_report(run.report, out_dir);
  for (const auto& t : run.tables) sp::emit_plot_data(t, std::filesystem::path(out_dir) / suite);

  for (const auto& c : run.report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  computed=" << sp::format_double(c.computed)
              << " expected=" << sp::format_double(c.expected) << " tol=" << sp::format_double(c.tolerance) << " ("
              << sp::to_string(c.norm) << ")";
    if (!c.message.empty()) std::cout << "  " << c.message;
    std::cout << "\n";
  }
  std::cout << suite << ": " << (run.report.all_pass() ? "PASS" : "FAIL") << " in " << run.report.wall_time_seconds
            << " s\n";
  return run.report.all_pass() ? kPass : kFail;
}

void cmd_list() {
  for (const auto& s : sp::suite_registry()) {
    std::cout << s.name << "\n    " << s.summary << "\n    keys:";
    for (const auto& k : s.keys) std::cout << " " << k;
    std::cout << "\n";
  }
}

/// A config file holding metric.* keys, or "family[:mass]", or
/// "perturbed_as:mass:inner_radius:terms".
sp::MetricField metric_from_argument(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) {
    const auto cfg = sp::Config::load(spec);
    cfg.validate(sp::metric_keys(), "--metric file");
    return sp::make_metric(sp::metric_from_config(cfg, {}));
  }
  std::vector<std::string> parts;
  std::string rest = spec;
  for (int k = 0; k < 3; ++k) {
    const auto c = rest.find(':');
    if (c == std::string::npos) break;
    parts.push_back(rest.substr(0, c));
    rest = rest.substr(c + 1);
  }
  parts.push_back(rest);
  auto num = [&](std::size_t i, double def) {
    if (i >= parts.size()) return def;
    try {
      return std::stod(parts[i]);
    } catch (const std::exception&) {
      throw sp::ConfigError("metric spec '" + spec + "' has a malformed number");
    }
  };
  sp::MetricSpec m;
  const std::string fam = parts[0];
  if (fam == "schwarzschild_full") {
    m.family = sp::MetricFamily::SchwarzschildIsotropic;
    m.full_manifold = true;
  } else {
    m.family = sp::parse_family(fam);
  }
  m.mass = num(1, m.family == sp::MetricFamily::Euclidean ? 0.0 : 1.0);
  if (m.family == sp::MetricFamily::PerturbedAS) {
    m.inner_radius = num(2, 1.0);
    if (parts.size() > 3) m.perturbation = sp::parse_perturbation(parts[3]);
  }
  return sp::make_metric(m);
}

int cmd_dump(const std::string& metric_spec, const std::string& points_path, const std::string& backend) {
  const auto metric = metric_from_argument(metric_spec);
  sp::CurvatureOptions opts;
  if (backend == "fd")
    opts.backend = sp::Backend::FiniteDifference;
  else if (backend != "dual")
    throw sp::ConfigError("backend must be 'dual' or 'fd'");
  std::ifstream in(points_path);
  if (!in) throw sp::ConfigError("cannot open points file '" + points_path + "'");
  nlohmann::ordered_json out;
  out["metric"] = metric.name();
  out["points"] = nlohmann::ordered_json::array();
  std::string line;
  int lineno = 0;
  auto mat = [](const sp::Mat3d& m) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& row : m) j.push_back({row[0], row[1], row[2]});
    return j;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double x[3];
    if (!(ls >> x[0])) continue;
    if (!(ls >> x[1] >> x[2]))
      throw sp::ConfigError(points_path + ":" + std::to_string(lineno) + ": expected three coordinates");
    const sp::Point3 p(x[0], x[1], x[2]);
    nlohmann::ordered_json pj;
    pj["x"] = {x[0], x[1], x[2]};
    try {
      const auto c = sp::curvature_at(metric, p, opts);
      const auto fr = sp::eigenframe_from(c.ricci, c.metric);
      pj["metric"] = mat(c.metric);
      pj["ricci"] = mat(c.ricci);
      pj["scalar"] = c.scalar;
      pj["ricci_eigenvalues"] = {fr.eigenvalues[0], fr.eigenvalues[1], fr.eigenvalues[2]};
    } catch (const sp::Error& e) {
      pj["error"] = std::string(e.kind()) + ": " + e.what();
    }
    out["points"].push_back(pj);
  }
  std::cout << out.dump(2) << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of static potentials for scalar-flat 3-metrics"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Run one verification suite");
  std::string suite, config_path, out_dir;
  bool parallel = false;
  std::optional<std::uint64_t> seed;
  verify->add_option("suite", suite, "Suite name (see list-suites)")->required();
  verify->add_option("--config", config_path, "key = value configuration file");
  verify->add_option("--out", out_dir, "Output directory for reports and CSV tables")->required();
  verify->add_flag("--parallel", parallel, "Run independent stages concurrently");
  verify->add_option("--seed", seed, "Seed for sampled points");

  auto* list = app.add_subcommand("list-suites", "List registered suites and their keys");

  auto* dump = app.add_subcommand("dump-curvature", "Print metric, Ricci and scalar curvature at points");
  std::string metric_spec, points_path, backend = "dual";
  dump->add_option("--metric", metric_spec, "family[:mass] or a file with metric.* keys")->required();
  dump->add_option("--points", points_path, "File with one point per line")->required();
  dump->add_option("--backend", backend, "dual or fd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*verify) return cmd_verify(suite, config_path, out_dir, parallel, seed);
    if (*list) {
      cmd_list();
      return kPass;
    }
    if (*dump) return cmd_dump(metric_spec, points_path, backend);
  } catch (const sp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const sp::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return kFail;
  }
  return kPass;
}
