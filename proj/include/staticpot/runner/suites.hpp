#pragma once

// Verification suites and the runner that executes them.
//
// A suite reads all of its parameters up front (so the config echo is filled
// in before anything runs) and returns a list of stages. Stages are
// independent and may run concurrently; their checks are reported in
// declaration order regardless.

#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/geodesic_growth.hpp"
#include "staticpot/global_identities.hpp"
#include "staticpot/pointwise_identities.hpp"
#include "staticpot/runner/config.hpp"
#include "staticpot/runner/report.hpp"
#include "staticpot/static_potentials.hpp"
#include "staticpot/zero_set_geometry.hpp"

namespace staticpot {

struct StageOutput {
  std::vector<CheckRecord> checks;
  std::vector<Table> tables;
};

struct Stage {
  std::string name;
  std::function<StageOutput()> run;
};

struct SuiteDefinition {
  std::string name;
  std::string summary;
  /// Accepted keys besides the common ones ("suite", "seed").
  std::set<std::string> keys;
  std::function<std::vector<Stage>(const Config&, std::uint64_t seed)> build;
};

struct SuiteRun {
  SuiteReport report;
  std::vector<Table> tables;
};

// ---------------------------------------------------------------------------
// Sampling helpers

/// 53-bit uniforms from mt19937_64, identical on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : eng_(seed) {}
  double operator()() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double operator()(double a, double b) { return a + (b - a) * (*this)(); }

 private:
  std::mt19937_64 eng_;
};

/// Uniform directions, log-uniform radii in [r_lo, r_hi].
inline std::vector<Point3> random_shell_points(Uniform& u, int n, double r_lo, double r_hi) {
  if (n < 1) throw ConfigError("point count must be positive");
  if (!(r_lo > 0.0 && r_hi >= r_lo)) throw ConfigError("sampling shell needs 0 < r_min <= r_max");
  std::vector<Point3> out;
  for (int k = 0; k < n; ++k) {
    const double z = u(-1.0, 1.0), ph = u(0.0, 2.0 * std::numbers::pi);
    const double r = r_lo * std::pow(r_hi / r_lo, u());
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(r * s * std::cos(ph), r * s * std::sin(ph), r * z);
  }
  return out;
}

inline double max_abs_difference(const Riemann& a, const Riemann& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) m = std::max(m, std::abs(a[i][j][k][l] - b[i][j][k][l]));
  return m;
}

inline CheckRecord flag_check(std::string name, bool ok, std::string message = {}) {
  return make_check(std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, Norm::Absolute, std::move(message));
}

namespace detail {

inline std::set<std::string> with_metric_keys(std::set<std::string> keys) {
  keys.insert(metric_keys().begin(), metric_keys().end());
  return keys;
}

inline MetricSpec schwarzschild_spec(double m, bool full = false) {
  MetricSpec s;
  s.family = MetricFamily::SchwarzschildIsotropic;
  s.mass = m;
  s.full_manifold = full;
  return s;
}

inline std::string default_as_perturbation() { return "2,3,0.5,1,2; 2,2,0.3,0,0; 1,1,0.2,1,1"; }

inline MetricSpec perturbed_spec(double m, double inner) {
  MetricSpec s;
  s.family = MetricFamily::PerturbedAS;
  s.mass = m;
  s.inner_radius = inner;
  return s;
}

inline std::string schwarzschild_potential(double m) { return "schwarzschild_N(" + format_double(m) + ")"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites

inline SuiteDefinition euclidean_affine_suite() {
  SuiteDefinition s;
  s.name = "euclidean_affine";
  s.summary = "Flat space: zero curvature, every affine function is static";
  s.keys = {"points", "affine_sets", "sample.box", "tol.scalar", "tol.backend", "tol.static"};
  s.build = [](const Config& cfg, std::uint64_t seed) {
    const int n = static_cast<int>(cfg.get_int("points", 100));
    const int sets = static_cast<int>(cfg.get_int("affine_sets", 10));
    const double box = cfg.get_double("sample.box", 10.0);
    const double tol_scalar = cfg.get_double("tol.scalar", 1e-8);
    const double tol_backend = cfg.get_double("tol.backend", 1e-6);
    const double tol_static = cfg.get_double("tol.static", 1e-12);
    if (n < 1 || sets < 1) throw ConfigError("points and affine_sets must be positive");
    Uniform u(seed);
    std::vector<Point3> pts;
    for (int k = 0; k < n; ++k) pts.emplace_back(u(-box, box), u(-box, box), u(-box, box));
    std::vector<std::array<double, 4>> coeffs;
    for (int k = 0; k < sets; ++k) coeffs.push_back({u(-5, 5), u(-5, 5), u(-5, 5), u(-5, 5)});
    const MetricField metric = MetricField::euclidean();

    std::vector<Stage> st;
    st.push_back({"curvature", [=] {
                    StageOutput o;
                    double rmax = 0.0, dmax = 0.0;
                    for (const auto& p : pts) {
                      const auto c = curvature_at(metric, p);
                      const auto fd = curvature_at(metric, p, {Backend::FiniteDifference});
                      rmax = std::max(rmax, std::abs(c.scalar));
                      dmax = std::max(dmax, max_abs_difference(c.riemann, fd.riemann));
                    }
                    o.checks.push_back(make_check("scalar_curvature_max", rmax, 0.0, tol_scalar, Norm::UpperBound));
                    o.checks.push_back(make_check("backend_agreement_max", dmax, 0.0, tol_backend, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"affine_static", [=] {
                    StageOutput o;
                    double worst = 0.0;
                    for (const auto& a : coeffs) {
                      const auto f = PotentialField::affine(a[0], a[1], a[2], a[3]);
                      for (const auto& p : pts) worst = std::max(worst, static_residual(f, metric, p).combined_norm);
                    }
                    o.checks.push_back(make_check("affine_residual_max", worst, 0.0, tol_static, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"quadratic_rejected", [=] {
                    StageOutput o;
                    bool rejected = false;
                    try {
                      require_static(PotentialField::custom("x1^2"), metric, pts.front());
                    } catch (const NotStaticError&) {
                      rejected = true;
                    }
                    o.checks.push_back(flag_check("quadratic_not_static", rejected));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition schwarzschild_static_suite() {
  SuiteDefinition s;
  s.name = "schwarzschild_static";
  s.summary = "Schwarzschild: scalar-flat, backends agree, N is static, Bochner identity";
  s.keys = detail::with_metric_keys({"potential", "points", "sample.r_min", "sample.r_max", "static.threshold",
                                     "tol.scalar", "tol.backend", "tol.bochner"});
  s.build = [](const Config& cfg, std::uint64_t seed) {
    const MetricSpec spec = metric_from_config(cfg, detail::schwarzschild_spec(2.0));
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", detail::schwarzschild_potential(spec.mass)));
    const int n = static_cast<int>(cfg.get_int("points", 100));
    const double r_lo = cfg.get_double("sample.r_min", std::max(1.0, std::abs(spec.mass)));
    const double r_hi = cfg.get_double("sample.r_max", 50.0);
    const double thr = cfg.get_double("static.threshold", 1e-7);
    const double tol_scalar = cfg.get_double("tol.scalar", 1e-8);
    const double tol_backend = cfg.get_double("tol.backend", 1e-6);
    const double tol_bochner = cfg.get_double("tol.bochner", 1e-8);
    Uniform u(seed);
    const auto pts = random_shell_points(u, n, r_lo, r_hi);

    std::vector<Stage> st;
    st.push_back({"curvature", [=] {
                    StageOutput o;
                    double rmax = 0.0, dmax = 0.0;
                    for (const auto& p : pts) {
                      const auto c = curvature_at(metric, p);
                      const auto fd = curvature_at(metric, p, {Backend::FiniteDifference});
                      rmax = std::max(rmax, std::abs(c.scalar));
                      dmax = std::max(dmax, max_abs_difference(c.riemann, fd.riemann));
                    }
                    o.checks.push_back(make_check("scalar_curvature_max", rmax, 0.0, tol_scalar, Norm::UpperBound));
                    o.checks.push_back(make_check("backend_agreement_max", dmax, 0.0, tol_backend, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"static_residual", [=] {
                    StageOutput o;
                    double worst = 0.0;
                    for (const auto& p : pts) {
                      require_static(f, metric, p, {thr});
                      worst = std::max(worst, static_residual(f, metric, p).combined_norm / (1.0 + std::abs(f.value(p))));
                    }
                    o.checks.push_back(make_check("static_residual_max", worst, 0.0, thr, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"bochner", [=] {
                    StageOutput o;
                    double worst = 0.0;
                    for (const auto& p : pts) worst = std::max(worst, std::abs(bochner_residual(f, metric, p, {thr})));
                    o.checks.push_back(make_check("bochner_residual_max", worst, 0.0, tol_bochner, Norm::UpperBound));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition tod_identities_suite() {
  SuiteDefinition s;
  s.name = "tod_identities";
  s.summary = "Eigenframe identities for Ricci derivatives and Riemann reconstruction";
  s.keys = detail::with_metric_keys({"potential", "points", "sample.r_min", "sample.r_max", "static.threshold",
                                     "eigen.tau", "tol.tod", "tol.reconstruction", "tol.radial"});
  s.build = [](const Config& cfg, std::uint64_t seed) {
    const MetricSpec spec = metric_from_config(cfg, detail::schwarzschild_spec(2.0));
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", detail::schwarzschild_potential(spec.mass)));
    const int n = static_cast<int>(cfg.get_int("points", 50));
    const double r_lo = cfg.get_double("sample.r_min", std::max(1.0, std::abs(spec.mass)));
    const double r_hi = cfg.get_double("sample.r_max", 50.0);
    const double thr = cfg.get_double("static.threshold", 1e-7);
    const double tau_eig = cfg.get_double("eigen.tau", 1e-6);
    const double tol_tod = cfg.get_double("tol.tod", 1e-5);
    const double tol_rec = cfg.get_double("tol.reconstruction", 1e-7);
    const double tol_rad = cfg.get_double("tol.radial", 1e-6);
    Uniform u(seed);
    const auto pts = random_shell_points(u, n, r_lo, r_hi);

    std::vector<Stage> st;
    st.push_back({"tod", [=] {
                    StageOutput o;
                    double worst = 0.0;
                    for (const auto& p : pts)
                      for (double r : tod_identity_residuals(f, metric, p, {thr})) worst = std::max(worst, std::abs(r));
                    o.checks.push_back(make_check("tod_residual_max", worst, 0.0, tol_tod, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"reconstruction", [=] {
                    StageOutput o;
                    double worst = 0.0;
                    for (const auto& p : pts) {
                      const auto c = curvature_at(metric, p);
                      worst = std::max(worst, max_abs_difference(
                                                  reconstruct_riemann_from_ricci(c.ricci, c.scalar, c.metric), c.riemann));
                    }
                    o.checks.push_back(make_check("reconstruction_error_max", worst, 0.0, tol_rec, Norm::UpperBound));
                    return o;
                  }});
    if (spec.family == MetricFamily::SchwarzschildIsotropic && spec.mass != 0.0) {
      st.push_back({"eigen_structure", [=] {
                      StageOutput o;
                      const auto scan = eigenvalue_gap_scan(metric, pts, tau_eig);
                      auto c = make_check("two_equal_fraction", double(scan.two_equal) / scan.rows.size(), 1.0, 0.0,
                                          Norm::Absolute);
                      c.details["all_distinct"] = scan.all_distinct;
                      c.details["all_equal"] = scan.all_equal;
                      o.checks.push_back(c);
                      o.checks.push_back(
                          make_check("simple_direction_radial_deviation", scan.max_radial_deviation, 0.0, tol_rad, Norm::UpperBound));
                      return o;
                    }});
    }
    return st;
  };
  return s;
}

inline SuiteDefinition growth_bound_suite() {
  SuiteDefinition s;
  s.name = "growth_bound";
  s.summary = "Comparison bound for f'' = h f with |h| <= eps t^-2";
  s.keys = {"epsilon", "t0", "t1", "samples", "initial_scale", "tol.extremal", "tol.alpha", "geodesic.mass",
            "geodesic.r0", "geodesic.t_end"};
  s.build = [](const Config& cfg, std::uint64_t) {
    const double eps = cfg.get_double("epsilon", 0.5);
    const double t0 = cfg.get_double("t0", 1.0);
    const double t1 = cfg.get_double("t1", 1e4);
    const int ns = static_cast<int>(cfg.get_int("samples", 400));
    const double scale = cfg.get_double("initial_scale", 0.99);
    const double tol_ext = cfg.get_double("tol.extremal", 1e-8);
    const double tol_alpha = cfg.get_double("tol.alpha", 1e-14);
    const double gm = cfg.get_double("geodesic.mass", 1.0);
    const double gr0 = cfg.get_double("geodesic.r0", 10.0);
    const double gt1 = cfg.get_double("geodesic.t_end", 200.0);
    if (!(t1 > t0 && t0 > 0.0) || ns < 2) throw ConfigError("growth_bound needs 0 < t0 < t1 and samples >= 2");
    if (!(scale > 0.0 && scale < 1.0)) throw ConfigError("initial_scale must lie in (0, 1)");
    std::vector<double> times;
    for (int k = 0; k < ns; ++k) times.push_back(t0 * std::pow(t1 / t0, double(k) / (ns - 1)));
    times.back() = t1;

    std::vector<Stage> st;
    st.push_back({"comparison", [=] {
                    StageOutput o;
                    const auto bound = make_growth_bound(eps, 1.0, t0);
                    o.checks.push_back(make_check("alpha_quadratic_residual", bound.alpha * (bound.alpha - 1.0), eps,
                                                  tol_alpha, Norm::Absolute));
                    const std::vector<std::pair<std::string, std::function<double(double)>>> hs{
                        {"h=+eps/t^2", [eps](double t) { return eps / (t * t); }},
                        {"h=-eps/t^2", [eps](double t) { return -eps / (t * t); }},
                        {"h=eps*cos(t)/t^2", [eps](double t) { return eps * std::cos(t) / (t * t); }}};
                    long violations = 0;
                    double min_margin = std::numeric_limits<double>::infinity();
                    for (const auto& [label, h] : hs)
                      for (double s1 : {-scale, scale})
                        for (double s2 : {-scale, scale}) {
                          const auto smp = transport_scalar(h, s1 * bound.w(t0), s2 * bound.w_prime(t0), times);
                          const auto v = growth_bound_check(smp, bound);
                          violations += v.violations;
                          min_margin = std::min(min_margin, v.min_margin);
                        }
                    auto c = make_check("comparison_violations", double(violations), 0.0, 0.0, Norm::Absolute);
                    c.details["alpha"] = bound.alpha;
                    c.details["A"] = bound.A;
                    c.details["min_margin"] = min_margin;
                    o.checks.push_back(c);
                    return o;
                  }});
    st.push_back({"extremal", [=] {
                    StageOutput o;
                    const auto bound = make_growth_bound(eps, 1.0, t0);
                    const auto smp = transport_scalar([eps](double t) { return eps / (t * t); }, bound.w(t0),
                                                      bound.w_prime(t0), times);
                    double worst = 0.0;
                    Table tab{"growth_extremal", {"t", "f", "w"}, {}};
                    for (const auto& x : smp) {
                      worst = std::max(worst, std::abs(x.f - bound.w(x.t)) / bound.w(x.t));
                      tab.rows.push_back({x.t, x.f, bound.w(x.t)});
                    }
                    o.checks.push_back(make_check("extremal_relative_error", worst, 0.0, tol_ext, Norm::UpperBound));
                    o.tables.push_back(std::move(tab));
                    return o;
                  }});
    st.push_back({"geodesic", [=] {
                    StageOutput o;
                    const MetricField metric = MetricField::schwarzschild(gm);
                    const double phi = 1.0 + gm / (2.0 * gr0);
                    GeodesicState start;
                    start.position = Point3(gr0, 0.0, 0.0);
                    start.velocity = {1.0 / (phi * phi), 0.0, 0.0};
                    start.t = gr0;
                    const auto bound = make_growth_bound(eps, 1.0, gr0);
                    start.f_val = 0.5;
                    start.f_deriv = 0.5;
                    const auto traj = integrate_geodesic(metric, start, gt1);
                    const auto v = growth_bound_check(growth_samples(traj), bound);
                    auto c = make_check("geodesic_violations", double(v.violations), 0.0, 0.0, Norm::Absolute);
                    c.details["speed_drift"] = traj.max_speed_drift;
                    c.details["steps"] = double(traj.states.size());
                    o.checks.push_back(c);
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition zero_set_gauss_bonnet_suite() {
  SuiteDefinition s;
  s.name = "zero_set_gauss_bonnet";
  s.summary = "Horizon zero-set laws and the geodesic-curvature limit on graph zero sets";
  s.keys = detail::with_metric_keys({"horizon.mass", "horizon.n_lat", "horizon.n_phi", "tol.grad_spread", "tol.law",
                                     "tol.constant", "tol.second_fundamental", "potential", "graph.inner", "graph.outer",
                                     "graph.n_radial", "graph.n_angular", "graph.ring_nodes", "radii",
                                     "tol.gauss_bonnet", "tol.exponent"});
  s.build = [](const Config& cfg, std::uint64_t) {
    const double hm = cfg.get_double("horizon.mass", 2.0);
    const int n_lat = static_cast<int>(cfg.get_int("horizon.n_lat", 96));
    const int n_phi = static_cast<int>(cfg.get_int("horizon.n_phi", 96));
    const double tol_spread = cfg.get_double("tol.grad_spread", 1e-4);
    const double tol_law = cfg.get_double("tol.law", 1e-4);
    const double tol_const = cfg.get_double("tol.constant", 1e-4);
    const double tol_ii = cfg.get_double("tol.second_fundamental", 1e-8);
    if (!(hm > 0.0)) throw ConfigError("horizon.mass must be positive");

    const MetricSpec spec = metric_from_config(cfg, detail::perturbed_spec(1.0, 1.0), detail::default_as_perturbation());
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", "custom(x1 + ln(r))"));
    GraphGrid grid;
    grid.inner = cfg.get_double("graph.inner", 20.0);
    grid.outer = cfg.get_double("graph.outer", 250.0);
    grid.n_radial = static_cast<int>(cfg.get_int("graph.n_radial", 40));
    grid.n_angular = static_cast<int>(cfg.get_int("graph.n_angular", 32));
    const int ring_nodes = static_cast<int>(cfg.get_int("graph.ring_nodes", 256));
    const auto radii = cfg.get_doubles("radii", {50.0, 100.0, 200.0});
    const double tol_gb = cfg.get_double("tol.gauss_bonnet", 0.01);
    const double tol_exp = cfg.get_double("tol.exponent", 0.3);

    std::vector<Stage> st;
    st.push_back({"horizon_laws", [=] {
                    StageOutput o;
                    // Full manifold: the ray search brackets the horizon from inside.
                    const MetricField sch = MetricField::schwarzschild(hm, true);
                    const PotentialField n = PotentialField::schwarzschild_N(hm);
                    const RaySearch rs{hm / 8.0, 2.0 * hm, 1e-12};
                    const auto comp = extract_closed_component(n, sch, {0.0, 0.0, 0.0}, rs, n_lat, n_phi);
                    const auto law = zero_set_laws(n, sch, comp);
                    o.checks.push_back(make_check("euler_characteristic", comp.euler_char, 2.0, 0.0, Norm::Absolute));
                    o.checks.push_back(make_check("grad_norm_spread", comp.c_spread, 0.0, tol_spread, Norm::UpperBound));
                    o.checks.push_back(make_check("grad_norm_constant", comp.c, 1.0 / (4.0 * hm), tol_const, Norm::Relative));
                    o.checks.push_back(make_check("second_fundamental_max", law.max_second_fundamental, 0.0, tol_ii,
                                                  Norm::UpperBound));
                    auto k1 = make_check("K_plus_R33_relative", law.max_K_plus_R33, 0.0, tol_law, Norm::UpperBound);
                    k1.details["samples"] = law.intrinsic_samples;
                    o.checks.push_back(k1);
                    o.checks.push_back(make_check("K_minus_2R11_relative", law.max_K_minus_2R11, 0.0, tol_law, Norm::UpperBound));
                    return o;
                  }});
    st.push_back({"gauss_bonnet", [=] {
                    StageOutput o;
                    GraphSearch search;
                    const auto sg = extract_zero_graph(f, metric, grid, search);
                    const auto gb = gauss_bonnet_limit(sg, radii, ring_nodes);
                    auto c = make_check("kappa_integral_limit", gb.extrapolated, 2.0 * std::numbers::pi, tol_gb,
                                        Norm::Relative);
                    c.details["h_decay_exponent"] = sg.h_decay_exponent;
                    c.details["q_growth_exponent"] = sg.q_growth_exponent;
                    o.checks.push_back(c);
                    o.checks.push_back(make_check("kappa_deviation_exponent", gb.kappa_exponent, -metric.tau(), tol_exp,
                                                  Norm::Absolute));
                    Table t{"gauss_bonnet", {"R", "kappa_integral"}, {}};
                    std::vector<double> rr, dd;
                    for (const auto& ring : gb.rings) {
                      t.rows.push_back({ring.radius, ring.kappa_integral});
                      rr.push_back(ring.radius);
                      dd.push_back(ring.kappa_deviation);
                    }
                    o.tables.push_back(std::move(t));
                    o.tables.push_back(loglog_table("kappa_deviation", "R", "deviation", rr, dd));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition mass_fit_suite() {
  SuiteDefinition s;
  s.name = "mass_fit";
  s.summary = "Mass from the 1/r expansion of a bounded static potential";
  s.keys = detail::with_metric_keys({"potential", "window", "terms", "n_radii", "expected_mass", "tol.mass"});
  s.build = [](const Config& cfg, std::uint64_t) {
    const MetricSpec spec = metric_from_config(cfg, detail::schwarzschild_spec(2.0));
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", detail::schwarzschild_potential(spec.mass)));
    const auto window = cfg.get_doubles("window", {50.0, 400.0});
    MassFitOptions mo;
    mo.terms = static_cast<int>(cfg.get_int("terms", 3));
    mo.n_radii = static_cast<int>(cfg.get_int("n_radii", 8));
    const double expected = cfg.get_double("expected_mass", spec.mass);
    const double tol = cfg.get_double("tol.mass", 0.01);
    if (window.size() != 2) throw ConfigError("window takes two radii");

    std::vector<Stage> st;
    st.push_back({"fit", [=] {
                    StageOutput o;
                    const auto fit = fit_mass_expansion(f, metric, {window[0], window[1]}, mo);
                    auto c = make_check("mass", fit.mass_m, expected, tol, Norm::Relative);
                    c.details["limit_a"] = fit.limit_a;
                    c.details["coeff_A"] = fit.coeff_A;
                    c.details["residual_norm"] = fit.residual_norm;
                    o.checks.push_back(c);
                    Table t{"mass_fit", {"r", "sphere_mean"}, {}};
                    for (std::size_t k = 0; k < fit.radii.size(); ++k) t.rows.push_back({fit.radii[k], fit.sphere_means[k]});
                    o.tables.push_back(std::move(t));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition huisken_yau_suite() {
  SuiteDefinition s;
  s.name = "huisken_yau";
  s.summary = "Ricci minus its Schwarzschild model decays like |y|^-4";
  s.keys = detail::with_metric_keys({"direction", "radii", "table_radii", "expected_ratio", "tol.factor", "tol.baseline"});
  s.build = [](const Config& cfg, std::uint64_t) {
    const MetricSpec spec = metric_from_config(cfg, detail::perturbed_spec(1.0, 1.0), detail::default_as_perturbation());
    const MetricField metric = make_metric(spec);
    auto dir = cfg.get_doubles("direction", {0.6, 0.48, 0.64});
    const auto radii = cfg.get_doubles("radii", {20.0, 40.0});
    const auto table_radii = cfg.get_doubles("table_radii", {20.0, 28.0, 40.0, 56.0, 80.0});
    if (dir.size() != 3 || radii.size() != 2) throw ConfigError("direction takes three components and radii two values");
    const double expected = cfg.get_double("expected_ratio", std::pow(radii[0] / radii[1], 4));
    const double factor = cfg.get_double("tol.factor", 1.5);
    const double tol_base = cfg.get_double("tol.baseline", 1e-12);
    const double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (!(dn > 0.0) || !(factor > 1.0)) throw ConfigError("direction must be nonzero and tol.factor above 1");
    const Vec3d d{dir[0] / dn, dir[1] / dn, dir[2] / dn};

    std::vector<Stage> st;
    st.push_back({"doubling", [=] {
                    StageOutput o;
                    const double a = huisken_yau_residual(metric, Point3(radii[0] * d));
                    const double b = huisken_yau_residual(metric, Point3(radii[1] * d));
                    const double ratio = b / a;
                    auto c = make_check("ratio_log_deviation", std::abs(std::log(ratio / expected)), 0.0, std::log(factor),
                                        Norm::UpperBound);
                    c.details["ratio"] = ratio;
                    c.details["expected_ratio"] = expected;
                    o.checks.push_back(c);
                    std::vector<double> res;
                    for (double r : table_radii) res.push_back(huisken_yau_residual(metric, Point3(r * d)));
                    o.tables.push_back(loglog_table("huisken_yau", "r", "residual", table_radii, res));
                    return o;
                  }});
    st.push_back({"schwarzschild_baseline", [=] {
                    StageOutput o;
                    const MetricField sch = MetricField::schwarzschild(spec.mass);
                    double worst = 0.0;
                    for (double r : table_radii)
                      worst = std::max(worst, huisken_yau_residual(sch, Point3(r * d)));
                    o.checks.push_back(make_check("pure_schwarzschild_residual_max", worst, 0.0, tol_base, Norm::UpperBound));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition anisotropy_limit_suite() {
  SuiteDefinition s;
  s.name = "anisotropy_limit";
  s.summary = "Scaled difference of Ricci along the two graph tangents tends to 3m";
  s.keys = {"masses", "potential", "y3_samples", "exponent", "tol.relative", "search.width_factor",
            "search.min_half_width"};
  s.build = [](const Config& cfg, std::uint64_t) {
    const auto masses = cfg.get_doubles("masses", {2.0, -1.0});
    const PotentialField f = parse_potential(cfg.get_string("potential", "custom(x1 + ln(r))"));
    const auto ys = cfg.get_doubles("y3_samples", {50.0, 100.0, 200.0, 400.0, 800.0});
    const long exponent = cfg.get_int("exponent", 2);
    const double tol = cfg.get_double("tol.relative", 0.05);
    GraphSearch search;
    search.width_factor = cfg.get_double("search.width_factor", search.width_factor);
    search.min_half_width = cfg.get_double("search.min_half_width", search.min_half_width);
    if (exponent != 2 && exponent != 3) throw ConfigError("exponent must be 2 or 3");

    std::vector<Stage> st;
    for (double m : masses) {
      const std::string tag = "m=" + format_double(m);
      st.push_back({"anisotropy " + tag, [=] {
                      StageOutput o;
                      const MetricField metric = MetricField::schwarzschild(m);
                      const auto res = anisotropy_limit(f, metric, ys, search);
                      const double lim = exponent == 2 ? res.limit2 : res.limit3;
                      auto c = make_check("limit_" + tag, lim, 3.0 * m, tol, Norm::Relative);
                      c.details["limit_exponent_2"] = res.limit2;
                      c.details["limit_exponent_3"] = res.limit3;
                      o.checks.push_back(c);
                      Table t{"anisotropy_" + tag, {"y3", "difference", "scaled2", "scaled3"}, {}};
                      for (const auto& p : res.points) t.rows.push_back({p.y3, p.difference, p.scaled2, p.scaled3});
                      o.tables.push_back(std::move(t));
                      return o;
                    }});
    }
    return st;
  };
  return s;
}

inline SuiteDefinition integral_identities_suite() {
  SuiteDefinition s;
  s.name = "integral_identities";
  s.summary = "Divergence identity for f |Ric|^2 and the horizon bookkeeping instance";
  s.keys = {"mass", "annuli.inner", "annuli.outer", "quadrature.n_theta", "quadrature.n_phi", "quadrature.n_radial",
            "tol.defect", "tol.bookkeeping", "horizon.n_lat", "horizon.n_phi", "flux_radii", "tol.flux_slope"};
  s.build = [](const Config& cfg, std::uint64_t) {
    const double m = cfg.get_double("mass", 1.0);
    const auto inner = cfg.get_doubles("annuli.inner", {2.0, 1.0});
    const auto outer = cfg.get_doubles("annuli.outer", {40.0, 10.0});
    QuadratureSpec q;
    q.n_theta = static_cast<int>(cfg.get_int("quadrature.n_theta", q.n_theta));
    q.n_phi = static_cast<int>(cfg.get_int("quadrature.n_phi", q.n_phi));
    q.n_radial = static_cast<int>(cfg.get_int("quadrature.n_radial", q.n_radial));
    const double tol_defect = cfg.get_double("tol.defect", 1e-5);
    const double tol_book = cfg.get_double("tol.bookkeeping", 0.02);
    const int n_lat = static_cast<int>(cfg.get_int("horizon.n_lat", 48));
    const int n_phi = static_cast<int>(cfg.get_int("horizon.n_phi", 48));
    const auto flux_radii = cfg.get_doubles("flux_radii", {20.0, 40.0, 80.0, 160.0});
    const double tol_slope = cfg.get_double("tol.flux_slope", -1.0);
    if (!(m > 0.0)) throw ConfigError("mass must be positive");
    if (inner.size() != outer.size() || inner.empty()) throw ConfigError("annuli.inner and annuli.outer must pair up");

    const MetricField metric = MetricField::schwarzschild(m);
    const PotentialField n = PotentialField::schwarzschild_N(m);
    std::vector<Stage> st;
    for (std::size_t k = 0; k < inner.size(); ++k) {
      const double r1 = inner[k], r2 = outer[k];
      const std::string tag = format_double(r1) + "-" + format_double(r2);
      st.push_back({"divergence " + tag, [=] {
                      StageOutput o;
                      IntegralOptions io;
                      io.quadrature = q;
                      const auto rep = integral_identity_check(n, metric, {r1, r2}, io);
                      auto c = make_check("relative_defect_" + tag, rep.relative_defect, 0.0, tol_defect, Norm::UpperBound);
                      c.details["bulk"] = rep.bulk;
                      c.details["flux_inner"] = rep.flux_inner;
                      c.details["flux_outer"] = rep.flux_outer;
                      o.checks.push_back(c);
                      return o;
                    }});
    }
    st.push_back({"bookkeeping", [=] {
                    StageOutput o;
                    const MetricField full = MetricField::schwarzschild(m, true);
                    const PointIntegrand F = [&](const Point3& p, const CurvatureBundle& c) {
                      return std::abs(n.value(p)) * ricci_norm_squared(c);
                    };
                    const double h = 0.5 * m;
                    const double lhs = shell_integral(full, F, h, 0.0, q, RadialMap::ToInfinity) +
                                       shell_integral(full, F, 0.0, h, q, RadialMap::FromOrigin);
                    const auto comp = extract_closed_component(n, full, {0.0, 0.0, 0.0}, {m / 8.0, 2.0 * m, 1e-12},
                                                               n_lat, n_phi);
                    const int ends = 1;
                    const double rhs = 4.0 * std::numbers::pi * comp.c * comp.euler_char * ends;
                    auto c = make_check("bookkeeping_balance", lhs, rhs, tol_book, Norm::Relative);
                    c.details["euler_characteristic"] = comp.euler_char;
                    c.details["c_tilde"] = comp.c;
                    o.checks.push_back(c);
                    return o;
                  }});
    st.push_back({"flux_decay", [=] {
                    StageOutput o;
                    auto field = [&](const Point3& p, const CurvatureBundle& c) { return ricci_of_gradient(c, n.gradient(p)); };
                    Table t{"flux", {"r", "flux"}, {}};
                    std::vector<double> mag;
                    for (double r : flux_radii) {
                      const double fl = sphere_flux(metric, field, r, q);
                      t.rows.push_back({r, fl});
                      mag.push_back(std::abs(fl));
                    }
                    o.checks.push_back(make_check("flux_decay_slope", loglog_slope(flux_radii, mag), 0.0, tol_slope,
                                                  Norm::UpperBound));
                    o.tables.push_back(std::move(t));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline SuiteDefinition conformal_double_suite() {
  SuiteDefinition s;
  s.name = "conformal_double";
  s.summary = "(1 +- f)^4 g is scalar-flat for a static harmonic f";
  s.keys = detail::with_metric_keys({"potential", "points", "sample.r_min", "sample.r_max", "tol.scalar", "tol.control"});
  s.build = [](const Config& cfg, std::uint64_t seed) {
    const MetricSpec spec = metric_from_config(cfg, detail::schwarzschild_spec(1.0));
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", detail::schwarzschild_potential(spec.mass)));
    const int n = static_cast<int>(cfg.get_int("points", 50));
    const double r_lo = cfg.get_double("sample.r_min", std::max(1.0, std::abs(spec.mass)));
    const double r_hi = cfg.get_double("sample.r_max", 50.0);
    const double tol = cfg.get_double("tol.scalar", 1e-6);
    const double tol_ctl = cfg.get_double("tol.control", 1e-8);
    Uniform u(seed);
    const auto pts = random_shell_points(u, n, r_lo, r_hi);

    std::vector<Stage> st;
    for (int sign : {1, -1}) {
      const std::string tag = sign > 0 ? "plus" : "minus";
      st.push_back({"scalar " + tag, [=] {
                      StageOutput o;
                      double worst = 0.0;
                      for (const auto& p : pts) worst = std::max(worst, std::abs(conformal_double_scalar(f, metric, sign, p)));
                      o.checks.push_back(make_check("scalar_curvature_max_" + tag, worst, 0.0, tol, Norm::UpperBound));
                      return o;
                    }});
    }
    st.push_back({"non_harmonic_control", [=] {
                    // Flat background: R of u^4 delta is -8 (Laplacian u) / u^5.
                    StageOutput o;
                    const Point3 p(1.0, 0.3, -0.2);
                    const double uu = 1.0 + p.x1 * p.x1;
                    const double oracle = -8.0 * 2.0 / std::pow(uu, 5);
                    const double got = conformal_double_scalar(PotentialField::custom("x1^2"), MetricField::euclidean(), 1, p);
                    o.checks.push_back(make_check("non_harmonic_scalar", got, oracle, tol_ctl, Norm::Absolute));
                    return o;
                  }});
    return st;
  };
  return s;
}

inline std::vector<Point3> parse_points(const std::string& s) {
  std::vector<Point3> out;
  for (const auto& item : split(s, ';')) {
    if (item.empty()) continue;
    const auto f = split(item, ',');
    if (f.size() != 3) throw ConfigError("point '" + item + "' needs three coordinates");
    try {
      out.emplace_back(std::stod(f[0]), std::stod(f[1]), std::stod(f[2]));
    } catch (const std::exception&) {
      throw ConfigError("malformed point '" + item + "'");
    }
  }
  return out;
}

inline SuiteDefinition flow_classify_suite() {
  SuiteDefinition s;
  s.name = "flow_classify";
  s.summary = "Gradient-flow lines of N escape to the end with f increasing to 1";
  s.keys = detail::with_metric_keys({"potential", "starts", "escape_radius", "expected_b", "tol.b"});
  s.build = [](const Config& cfg, std::uint64_t) {
    const MetricSpec spec = metric_from_config(cfg, detail::schwarzschild_spec(1.0));
    const MetricField metric = make_metric(spec);
    const PotentialField f = parse_potential(cfg.get_string("potential", detail::schwarzschild_potential(spec.mass)));
    const std::string starts_s = cfg.get_string("starts", "3,0.5,0.2; 5,-2,1; 10,3,-4; 0.8,0.1,-0.3");
    const auto starts = parse_points(starts_s);
    FlowBudget budget;
    budget.escape_radius = cfg.get_double("escape_radius", budget.escape_radius);
    const double expected_b = cfg.get_double("expected_b", 1.0);
    const double tol_b = cfg.get_double("tol.b", 1e-3);
    if (starts.empty()) throw ConfigError("starts lists no points");

    std::vector<Stage> st;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      const Point3 p = starts[k];
      const std::string tag = std::to_string(k + 1);
      st.push_back({"trace " + tag, [=] {
                      StageOutput o;
                      const auto tr = flow_classify(f, metric, p, budget);
                      o.checks.push_back(flag_check("escapes_" + tag, tr.classification == FlowClass::EscapeToEnd,
                                                    to_string(tr.classification)));
                      o.checks.push_back(make_check("limit_b_" + tag, tr.limit_b, expected_b, tol_b, Norm::Absolute));
                      o.checks.push_back(
                          make_check("monotonicity_violations_" + tag, tr.monotonicity_violations, 0.0, 0.0, Norm::Absolute));
                      Table t{"flow_" + tag, {"t", "r", "f", "grad_norm"}, {}};
                      const std::size_t stride = std::max<std::size_t>(1, tr.samples.size() / 200);
                      for (std::size_t i = 0; i < tr.samples.size(); i += stride) {
                        const auto& x = tr.samples[i];
                        t.rows.push_back({x.t, x.x.r(), x.f, x.grad_norm});
                      }
                      o.tables.push_back(std::move(t));
                      return o;
                    }});
    }
    st.push_back({"affine_unbounded", [=] {
                    StageOutput o;
                    const auto tr = flow_classify(PotentialField::affine(0.0, 1.0, 0.0, 0.0), MetricField::euclidean(),
                                                  Point3(1.0, 2.0, 3.0), budget);
                    o.checks.push_back(flag_check("affine_b_unbounded", tr.b_unbounded, to_string(tr.classification)));
                    return o;
                  }});
    return st;
  };
  return s;
}

// ---------------------------------------------------------------------------
// Registry and runner

inline const std::vector<SuiteDefinition>& suite_registry() {
  static const std::vector<SuiteDefinition> r{
      euclidean_affine_suite(),   schwarzschild_static_suite(), tod_identities_suite(),
      growth_bound_suite(),       zero_set_gauss_bonnet_suite(), mass_fit_suite(),
      huisken_yau_suite(),        anisotropy_limit_suite(),      integral_identities_suite(),
      conformal_double_suite(),   flow_classify_suite()};
  return r;
}

inline const SuiteDefinition& find_suite(const std::string& name) {
  for (const auto& s : suite_registry())
    if (s.name == name) return s;
  throw ConfigError("unknown suite '" + name + "'");
}

inline StageOutput run_stage(const Stage& st) {
  try {
    return st.run();
  } catch (const Error& e) {
    return {{failed_check(st.name, e)}, {}};
  } catch (const std::exception& e) {
    CheckRecord c;
    c.name = st.name;
    c.computed = std::numeric_limits<double>::quiet_NaN();
    c.message = std::string("InternalError: ") + e.what();
    return {{c}, {}};
  }
}

/// Validates the config against the suite schema and runs every stage.
/// ConfigError escapes; every other error becomes a failed check.
inline SuiteRun run_suite(const SuiteDefinition& suite, const Config& cfg, std::uint64_t seed, bool parallel = false) {
  std::set<std::string> allowed = suite.keys;
  allowed.insert({"suite", "seed"});
  cfg.validate(allowed, "suite " + suite.name);
  if (cfg.has("suite")) {
    const std::string named = cfg.get_string("suite", suite.name);
    find_suite(named);
    if (named != suite.name) throw ConfigError("config is for suite '" + named + "', not '" + suite.name + "'");
  }
  const auto t_start = std::chrono::steady_clock::now();
  SuiteRun run;
  run.report.suite = suite.name;
  run.report.seed = seed;
  std::vector<Stage> stages;
  try {
    stages = suite.build(cfg, seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    run.report.checks.push_back(failed_check("setup", e));
  }
  run.report.config_echo = cfg.echo();

  std::vector<StageOutput> outs(stages.size());
  if (parallel) {
    std::vector<std::future<StageOutput>> fut;
    for (const auto& st : stages) fut.push_back(std::async(std::launch::async, [&st] { return run_stage(st); }));
    for (std::size_t k = 0; k < fut.size(); ++k) outs[k] = fut[k].get();
  } else {
    for (std::size_t k = 0; k < stages.size(); ++k) outs[k] = run_stage(stages[k]);
  }
  for (auto& o : outs) {
    for (auto& c : o.checks) run.report.checks.push_back(std::move(c));
    for (auto& t : o.tables) run.tables.push_back(std::move(t));
  }
  run.report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

}  // namespace staticpot
