#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "staticpot/runner/suites.hpp"

using namespace staticpot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("staticpot_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STATICPOT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const auto c = Config::parse("# header\n a = 1.5 \n\nb=x,y # trailing\nlist = 1, 2,3\n");
  EXPECT_DOUBLE_EQ(c.get_double("a", 0.0), 1.5);
  EXPECT_EQ(c.get_string("b", ""), "x,y");
  EXPECT_EQ(c.get_doubles("list", {}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.get_int("missing", 7), 7);
  EXPECT_EQ(c.echo().at("missing"), "7");
  EXPECT_EQ(c.echo().at("a"), "1.5");
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(Config::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(Config::parse(" = 3\n"), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/file.cfg"), ConfigError);
  const auto c = Config::parse("n = 2.5\nb = maybe\nx = 1e\n");
  EXPECT_THROW(c.get_int("n", 0), ConfigError);
  EXPECT_THROW(c.get_bool("b", false), ConfigError);
  EXPECT_THROW(c.get_double("x", 0.0), ConfigError);
  EXPECT_THROW(c.validate({"n", "b"}, "test"), ConfigError);
  EXPECT_NO_THROW(c.validate({"n", "b", "x"}, "test"));
}

TEST(Config, LineNumberInMessage) {
  try {
    Config::parse("a = 1\n\nbroken\n", "file.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("file.cfg:3"), std::string::npos);
  }
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double v : {40.0, 0.1, 1e-300, -2.5e17, 1.0 / 3.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(40.0), "40");
}

TEST(Config, PotentialSpecs) {
  EXPECT_DOUBLE_EQ(parse_potential("affine(1,2,0,0)").value(Point3(1.0, 1.0, 1.0)), 3.0);
  EXPECT_NEAR(parse_potential("schwarzschild_N(2)").value(Point3(1.0, 0.0, 0.0)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(parse_potential(" custom(x1*x2) ").value(Point3(2.0, 3.0, 0.0)), 6.0);
  EXPECT_THROW(parse_potential("affine(1,2)"), ConfigError);
  EXPECT_THROW(parse_potential("affine(1,a,0,0)"), ConfigError);
  EXPECT_THROW(parse_potential("cubic(1)"), ConfigError);
  EXPECT_THROW(parse_potential("custom(x1 +)"), ConfigError);
  EXPECT_THROW(parse_potential("custom(x1"), ConfigError);
}

TEST(Config, PerturbationRoundTrip) {
  const std::string s = "2,3,0.5,1,2; 2,2,0.3,0,0; 1,1,0.2,1,1";
  const auto terms = parse_perturbation(s);
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(terms[0].i, 1);
  EXPECT_EQ(terms[0].j, 2);
  EXPECT_EQ(format_perturbation(terms), s);
  EXPECT_TRUE(parse_perturbation("  ").empty());
  EXPECT_THROW(parse_perturbation("4,1,1,0,0"), ConfigError);
  EXPECT_THROW(parse_perturbation("1,1,1,0"), ConfigError);
  EXPECT_THROW(parse_perturbation("1,1,z,0,0"), ConfigError);
}

TEST(Config, MetricFromKeys) {
  const auto c = Config::parse("metric.family = perturbed_as\nmetric.mass = 2\nmetric.perturbation = 1,1,0.1,0,0\n");
  const auto spec = metric_from_config(c, MetricSpec{});
  EXPECT_EQ(spec.family, MetricFamily::PerturbedAS);
  EXPECT_DOUBLE_EQ(spec.mass, 2.0);
  EXPECT_EQ(spec.perturbation.size(), 1u);
  EXPECT_THROW(metric_from_config(Config::parse("metric.family = kerr\n"), MetricSpec{}), ConfigError);
}

TEST(Report, PassRules) {
  EXPECT_TRUE(evaluate_pass(1.0, 1.05, 0.1, Norm::Absolute));
  EXPECT_FALSE(evaluate_pass(1.0, 1.2, 0.1, Norm::Absolute));
  EXPECT_TRUE(evaluate_pass(99.0, 100.0, 0.02, Norm::Relative));
  EXPECT_FALSE(evaluate_pass(97.0, 100.0, 0.02, Norm::Relative));
  EXPECT_TRUE(evaluate_pass(-5.0, 123.0, 1e-3, Norm::UpperBound));
  EXPECT_FALSE(evaluate_pass(std::nan(""), 0.0, 1.0, Norm::Absolute));
  EXPECT_FALSE(evaluate_pass(INFINITY, 0.0, INFINITY, Norm::UpperBound));
  SuiteReport empty;
  EXPECT_FALSE(empty.all_pass());
}

TEST(Report, JsonEncodesNonFinite) {
  SuiteReport r;
  r.suite = "x";
  r.checks.push_back(failed_check("broken", NotStaticError("residual 2")));
  const auto j = to_json(r);
  EXPECT_EQ(j["checks"][0]["computed"], "nan");
  EXPECT_EQ(j["checks"][0]["message"], "NotStaticError: residual 2");
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(Report, CsvTables) {
  const Table empty{"t", {"R", "kappa_integral"}, {}};
  EXPECT_EQ(to_csv(empty), "R,kappa_integral\n");
  const Table three{"gauss_bonnet", {"R", "kappa_integral"}, {{50, 6.25}, {100, 6.27}, {200, 6.28}}};
  const auto dir = scratch("csv");
  emit_plot_data(three, dir);
  EXPECT_EQ(slurp(dir / "gauss_bonnet.csv"), "R,kappa_integral\n50,6.25\n100,6.27\n200,6.28\n");
  const Table bad{"bad", {"a", "b"}, {{1.0}}};
  EXPECT_THROW(to_csv(bad), IoError);
  EXPECT_THROW(emit_plot_data(Table{"none", {}, {}}, dir), IoError);
  fs::remove_all(dir);
}

TEST(Report, LogLogTableSlope) {
  const auto t = loglog_table("decay", "r", "d", {1.0, 2.0, 4.0}, {1.0, 0.25, 0.0625});
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.header.back(), "slope");
  for (const auto& row : t.rows) EXPECT_NEAR(row[4], -2.0, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_table("one", "r", "d", {1.0}, {2.0}).rows[0][4]));
}

TEST(Report, WriteFailureRaisesIoError) {
  SuiteReport r;
  r.suite = "x";
  EXPECT_THROW(write_report(r, "/proc/staticpot_no_such_dir"), IoError);
}

TEST(Registry, ElevenSuites) {
  const std::vector<std::string> expected{"euclidean_affine", "schwarzschild_static", "tod_identities",
                                          "growth_bound",     "zero_set_gauss_bonnet", "mass_fit",
                                          "huisken_yau",      "anisotropy_limit",      "integral_identities",
                                          "conformal_double", "flow_classify"};
  std::vector<std::string> names;
  for (const auto& s : suite_registry()) names.push_back(s.name);
  EXPECT_EQ(names, expected);
  EXPECT_THROW(find_suite("nope"), ConfigError);
}

TEST(Registry, EchoUsesDeclaredKeysOnly) {
  for (const auto& s : suite_registry()) {
    const Config cfg;
    s.build(cfg, 1);
    EXPECT_FALSE(cfg.echo().empty()) << s.name;
    for (const auto& [k, v] : cfg.echo()) EXPECT_TRUE(s.keys.count(k)) << s.name << " echoes undeclared key " << k;
  }
}

TEST(RunSuite, RejectsUnknownKeysAndMismatchedSuite) {
  const auto& s = find_suite("conformal_double");
  EXPECT_THROW(run_suite(s, Config::parse("bogus = 1\n"), 1), ConfigError);
  EXPECT_THROW(run_suite(s, Config::parse("suite = mass_fit\n"), 1), ConfigError);
  EXPECT_NO_THROW(run_suite(s, Config::parse("suite = conformal_double\n"), 1));
}

TEST(RunSuite, NonStaticPotentialFailsWithKind) {
  const auto run = run_suite(find_suite("schwarzschild_static"), Config::parse("potential = custom(x1^2)\n"), 1);
  EXPECT_FALSE(run.report.all_pass());
  bool saw = false;
  for (const auto& c : run.report.checks) saw |= c.message.rfind("NotStaticError", 0) == 0;
  EXPECT_TRUE(saw);
}

TEST(RunSuite, DeterministicAndParallelMatchesSequential) {
  const auto& s = find_suite("tod_identities");
  const Config cfg = Config::parse("points = 10\n");
  const auto a = run_suite(s, cfg, 7, false);
  const auto b = run_suite(s, cfg, 7, true);
  const auto c = run_suite(s, cfg, 7, false);
  EXPECT_EQ(to_json(a.report).dump(), to_json(b.report).dump());
  EXPECT_EQ(to_json(a.report).dump(), to_json(c.report).dump());
  const auto d = run_suite(s, cfg, 8, false);
  EXPECT_NE(to_json(a.report).dump(), to_json(d.report).dump());
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(run_cli("verify conformal_double --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "conformal_double.json"));
  EXPECT_TRUE(fs::exists(dir / "conformal_double.timing.json"));
  EXPECT_EQ(slurp(dir / "conformal_double.json").find("wall_time"), std::string::npos);

  {
    std::ofstream cfg(dir / "not_static.cfg");
    cfg << "potential = custom(x1^2)\n";
  }
  EXPECT_EQ(run_cli("verify schwarzschild_static --config " + (dir / "not_static.cfg").string() + " --out " + dir.string()), 1);
  EXPECT_NE(slurp(dir / "schwarzschild_static.json").find("NotStaticError"), std::string::npos);

  {
    std::ofstream cfg(dir / "unknown.cfg");
    cfg << "potentail = custom(x1)\n";
  }
  EXPECT_EQ(run_cli("verify schwarzschild_static --config " + (dir / "unknown.cfg").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("verify no_such_suite --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("verify mass_fit"), 2);
  EXPECT_EQ(run_cli("list-suites"), 0);
  EXPECT_EQ(run_cli(""), 2);
  fs::remove_all(dir);
}

TEST(Cli, DumpCurvature) {
  const auto dir = scratch("dump");
  {
    std::ofstream pts(dir / "points.txt");
    pts << "# x y z\n3, 0, 0\n0 4 0\n";
  }
  const std::string out = (dir / "out.json").string();
  const std::string cmd = std::string(STATICPOT_CLI) + " dump-curvature --metric schwarzschild:2 --points " +
                          (dir / "points.txt").string() + " > " + out;
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  ASSERT_EQ(j["points"].size(), 2u);
  // Scalar curvature vanishes; the radial Ricci eigenvalue is -2m/(r^3 phi^6).
  const double r = 3.0, phi = 1.0 + 1.0 / r;
  EXPECT_NEAR(j["points"][0]["scalar"].get<double>(), 0.0, 1e-12);
  const double radial = -4.0 / (r * r * r * std::pow(phi, 6));
  double lo = 0.0;
  for (const auto& e : j["points"][0]["ricci_eigenvalues"]) lo = std::min(lo, e.get<double>());
  EXPECT_NEAR(lo, radial, 1e-10);
  EXPECT_EQ(run_cli("dump-curvature --metric schwarzschild:2 --points " + (dir / "points.txt").string() + " --backend x"), 2);
  EXPECT_EQ(run_cli("dump-curvature --metric kerr --points " + (dir / "points.txt").string()), 2);
  fs::remove_all(dir);
}
