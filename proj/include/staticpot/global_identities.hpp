#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/core/fit.hpp"
#include "staticpot/quadrature.hpp"
#include "staticpot/static_potentials.hpp"
#include "staticpot/zero_set_geometry.hpp"

namespace staticpot {

// ---------------------------------------------------------------------------
// Mass extraction

struct MassFit {
  double limit_a = 0.0;   // value of f at infinity
  double coeff_A = 0.0;   // coefficient of 1/r
  double mass_m = 0.0;    // -A / a
  std::array<double, 2> fit_window{};
  double residual_norm = 0.0;
  int terms = 3;
  std::vector<double> radii;
  std::vector<double> sphere_means;
};

struct MassFitOptions {
  int n_radii = 8;
  /// Inverse-power basis size {1, 1/r, ..., 1/r^(terms-1)}.
  int terms = 3;
  int n_theta = 32;
  int n_phi = 64;
  /// Linear part larger than this (any component) means f is unbounded.
  double bounded_tolerance = 1e-3;
};

inline MassFit fit_mass_expansion(const PotentialField& f, const MetricField& metric, std::array<double, 2> window,
                                  const MassFitOptions& opts = {}) {
  if (!(window[0] >= 3.0 && window[1] > window[0])) throw PreconditionError("mass-fit window needs 3 <= r_min < r_max");
  if (opts.n_radii < opts.terms + 1) throw PreconditionError("mass fit needs more radii than basis terms");
  MassFit out;
  out.fit_window = window;
  out.terms = opts.terms;
  for (int k = 0; k < opts.n_radii; ++k)
    out.radii.push_back(window[0] * std::pow(window[1] / window[0], double(k) / (opts.n_radii - 1)));

  const auto lin = fit_linear_part(f, metric, out.radii, {opts.n_theta, opts.n_phi, 1.0});
  const double amax = std::max({std::abs(lin.a[0]), std::abs(lin.a[1]), std::abs(lin.a[2])});
  if (amax > opts.bounded_tolerance)
    throw UnboundedPotentialError("potential has linear part of size " + std::to_string(amax));

  const SphereRule rule(opts.n_theta, opts.n_phi);
  for (double r : out.radii)
    out.sphere_means.push_back(rule.average([&](const Vec3d& n) {
      const Vec3d x = r * n;
      metric.require_domain(x);
      return f.value(Point3(x));
    }));
  const auto fit = fit_inverse_powers(out.radii, out.sphere_means, opts.terms);
  out.limit_a = fit.coefficients[0];
  out.coeff_A = fit.coefficients[1];
  out.residual_norm = fit.residual_norm;
  if (std::abs(out.limit_a) < 1e-12) throw IllConditionedFitError("limit of f at infinity vanishes; mass undefined");
  out.mass_m = -out.coeff_A / out.limit_a;
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotic Ricci model

/// (m / r^3) phi^-2 (delta - 3 y y / r^2), phi = 1 + m / 2r.
inline Mat3d schwarzschild_ricci_model(double m, const Vec3d& y) {
  const double r = norm(y);
  const double phi = 1.0 + m / (2.0 * r);
  const double c = m / (r * r * r * phi * phi);
  Mat3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = c * (kronecker(i, j) - 3.0 * y[i] * y[j] / (r * r));
  return out;
}

/// Frobenius norm of Ric minus the model term, in chart components.
inline double huisken_yau_residual(const MetricField& metric, const Point3& p, const CurvatureOptions& opts = {}) {
  const auto c = curvature_at(metric, p, opts);
  const double phi = 1.0 + metric.mass() / (2.0 * p.r());
  if (!(phi > 0.0)) throw DomainError("conformal factor is not positive at " + format_point(p.vec()));
  return frobenius_norm(c.ricci - schwarzschild_ricci_model(metric.mass(), p.vec()));
}

// ---------------------------------------------------------------------------
// Anisotropy along a graph

struct AnisotropyPoint {
  double y3 = 0.0;
  double difference = 0.0;  // Ric(v, v) - Ric(w, w) with v, w the unit graph tangents
  double scaled2 = 0.0;     // |y3|^2 * difference
  double scaled3 = 0.0;     // |y3|^3 * difference
};

struct AnisotropyResult {
  std::vector<AnisotropyPoint> points;
  double limit2 = 0.0;  // extrapolated |y3|^2 sequence
  double limit3 = 0.0;  // extrapolated |y3|^3 sequence
};

/// Samples on the line y2 = 0 of the zero-set graph of f.
inline AnisotropyResult anisotropy_limit(const PotentialField& f, const MetricField& metric,
                                         const std::vector<double>& y3_samples, const GraphSearch& search = {}) {
  if (y3_samples.size() < 2) throw PreconditionError("anisotropy limit needs at least two samples");
  AnisotropyResult res;
  std::vector<double> ys, s2, s3;
  for (double y3 : y3_samples) {
    const GraphNode n = solve_graph_node(f, metric, {0.0, y3}, search);
    const auto c = curvature_at(metric, Point3(n.point()));
    const auto t = n.tangents();
    const double v = bilinear(c.ricci, t[0], t[0]) / bilinear(c.metric, t[0], t[0]);
    const double w = bilinear(c.ricci, t[1], t[1]) / bilinear(c.metric, t[1], t[1]);
    AnisotropyPoint ap;
    ap.y3 = y3;
    ap.difference = v - w;
    ap.scaled2 = y3 * y3 * ap.difference;
    ap.scaled3 = std::abs(y3) * y3 * y3 * ap.difference;
    res.points.push_back(ap);
    ys.push_back(std::abs(y3));
    s2.push_back(ap.scaled2);
    s3.push_back(ap.scaled3);
  }
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1])) throw PreconditionError("|y3| samples must increase");
  res.limit2 = extrapolate_to_infinity(ys, s2, 2);
  res.limit3 = extrapolate_to_infinity(ys, s3, 2);
  return res;
}

// ---------------------------------------------------------------------------
// Volume and flux integrals

/// Radial substitution used for shell integrals.
enum class RadialMap {
  Logarithmic,  // r = exp(u) on [ln r1, ln r2]
  ToInfinity,   // r = r1 / s on s in (0, 1]; r2 ignored
  FromOrigin,   // r = r2 * s on s in (0, 1]; r1 ignored
};

using PointIntegrand = std::function<double(const Point3&, const CurvatureBundle&)>;

/// Integral of F over r1 < |x| < r2 with the metric volume element.
inline double shell_integral(const MetricField& metric, const PointIntegrand& F, double r1, double r2,
                             const QuadratureSpec& q, RadialMap map = RadialMap::Logarithmic) {
  if (q.cost_volume() > q.budget)
    throw QuadratureBudgetError("shell quadrature needs " + std::to_string(q.cost_volume()) + " evaluations, budget " +
                                std::to_string(q.budget));
  const SphereRule sphere(q.n_theta, q.n_phi);
  const GaussLegendre gl(q.n_radial);
  std::vector<std::pair<double, double>> radial;  // (r, dr weight)
  switch (map) {
    case RadialMap::Logarithmic:
      if (!(r1 > 0.0 && r2 > r1)) throw PreconditionError("shell needs 0 < r1 < r2");
      for (auto [u, w] : gl.on(std::log(r1), std::log(r2))) radial.push_back({std::exp(u), w * std::exp(u)});
      break;
    case RadialMap::ToInfinity:
      if (!(r1 > 0.0)) throw PreconditionError("exterior shell needs r1 > 0");
      for (auto [s, w] : gl.on(0.0, 1.0)) radial.push_back({r1 / s, w * r1 / (s * s)});
      break;
    case RadialMap::FromOrigin:
      if (!(r2 > 0.0)) throw PreconditionError("interior ball needs r2 > 0");
      for (auto [s, w] : gl.on(0.0, 1.0)) radial.push_back({r2 * s, w * r2});
      break;
  }
  double total = 0.0;
  for (auto [r, wr] : radial) {
    double shell = 0.0;
    for (const auto& nd : sphere.nodes) {
      const Point3 p(r * nd.n);
      const auto c = curvature_at(metric, p);
      shell += nd.weight * F(p, c) * std::sqrt(determinant(c.metric));
    }
    total += wr * r * r * shell;
  }
  return total;
}

/// Flux of the vector field V (given by its contravariant components) through
/// the coordinate sphere |x| = r, with outward unit normal.
inline double sphere_flux(const MetricField& metric, const std::function<Vec3d(const Point3&, const CurvatureBundle&)>& V,
                          double r, const QuadratureSpec& q) {
  const SphereRule sphere(q.n_theta, q.n_phi);
  double s = 0.0;
  for (const auto& nd : sphere.nodes) {
    const Point3 p(r * nd.n);
    const auto c = curvature_at(metric, p);
    // Conormal dr = n_j dx^j; nu^i = g^ij n_j / |dr|_g; dA = sqrt(det g) |dr|_g r^2 dOmega.
    const double drn = std::sqrt(bilinear(c.inverse_metric, nd.n, nd.n));
    const Vec3d nu = (1.0 / drn) * matvec(c.inverse_metric, nd.n);
    const Vec3d v = V(p, c);
    s += nd.weight * bilinear(c.metric, v, nu) * std::sqrt(determinant(c.metric)) * drn * r * r;
  }
  return s;
}

inline double ricci_squared_norm(const CurvatureBundle& c) { return ricci_norm_squared(c); }

/// g(Ric(grad f), .) raised: (Ric(grad f))^i = g^ia R_ab g^bj f_j.
inline Vec3d ricci_of_gradient(const CurvatureBundle& c, const Vec3d& df) {
  return matvec(c.inverse_metric, matvec(c.ricci, matvec(c.inverse_metric, df)));
}

struct IntegralReport {
  double bulk = 0.0;          // integral of f |Ric|^2 over the annulus
  double flux_inner = 0.0;    // outward-radial flux of Ric(grad f) at r1
  double flux_outer = 0.0;    // at r2
  double defect = 0.0;        // bulk - (flux_outer - flux_inner)
  double relative_defect = 0.0;
  QuadratureSpec quadrature;
};

struct IntegralOptions {
  QuadratureSpec quadrature;
  StaticOptions statics;
  /// Static check points per radius on the mid sphere.
  int static_checks = 16;
};

inline IntegralReport integral_identity_check(const PotentialField& f, const MetricField& metric,
                                              std::array<double, 2> annulus, const IntegralOptions& opts = {}) {
  const double r1 = annulus[0], r2 = annulus[1];
  if (!(r1 > 0.0 && r2 > r1)) throw PreconditionError("annulus needs 0 < r1 < r2");
  // Staticity on a deterministic spread of points through the region.
  for (int k = 0; k < opts.static_checks; ++k) {
    const double r = r1 * std::pow(r2 / r1, (k + 0.5) / opts.static_checks);
    const double th = std::acos(1.0 - 2.0 * (k + 0.5) / opts.static_checks), ph = 2.399963 * k;
    require_static(f, metric, Point3(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)),
                   opts.statics);
  }
  IntegralReport rep;
  rep.quadrature = opts.quadrature;
  rep.bulk = shell_integral(
      metric, [&](const Point3& p, const CurvatureBundle& c) { return f.value(p) * ricci_norm_squared(c); }, r1, r2,
      opts.quadrature);
  auto field = [&](const Point3& p, const CurvatureBundle& c) { return ricci_of_gradient(c, f.gradient(p)); };
  rep.flux_inner = sphere_flux(metric, field, r1, opts.quadrature);
  rep.flux_outer = sphere_flux(metric, field, r2, opts.quadrature);
  rep.defect = rep.bulk - (rep.flux_outer - rep.flux_inner);
  const double scale = std::max({std::abs(rep.bulk), std::abs(rep.flux_inner), std::abs(rep.flux_outer)});
  rep.relative_defect = scale > 0.0 ? std::abs(rep.defect) / scale : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Conformal doubling

/// Scalar curvature of (1 + sign f)^4 g at p.
inline double conformal_double_scalar(const PotentialField& f, const MetricField& metric, int sign, const Point3& p) {
  if (sign != 1 && sign != -1) throw PreconditionError("sign must be +1 or -1");
  const double u = 1.0 + sign * f.value(p);
  if (u <= 1e-8) throw DegenerateConformalError("1 " + std::string(sign > 0 ? "+" : "-") + " f = " + std::to_string(u) +
                                                " at " + format_point(p.vec()));
  const double s = sign;
  const MetricField gamma = transform_metric(metric, "conformal_double", [f, s](const auto& x, const auto& g) {
    const auto w = 1.0 + s * f(x);
    const auto w2 = w * w;
    const auto w4 = w2 * w2;
    using S = std::decay_t<decltype(w4)>;
    Mat3<S> out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i][j] = w4 * g[i][j];
    return out;
  });
  return curvature_at(gamma, p).scalar;
}

// ---------------------------------------------------------------------------
// Gradient flow

enum class FlowClass { ExitBoundary, EscapeToEnd, ConvergeCritical, Unresolved };

inline const char* to_string(FlowClass c) {
  switch (c) {
    case FlowClass::ExitBoundary: return "ExitBoundary";
    case FlowClass::EscapeToEnd: return "EscapeToEnd";
    case FlowClass::ConvergeCritical: return "ConvergeCritical";
    case FlowClass::Unresolved: return "Unresolved";
  }
  return "unknown";
}

struct FlowSample {
  double t = 0.0;  // flow parameter of gamma' = grad f
  Point3 x;
  double f = 0.0;
  double grad_norm = 0.0;
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  std::array<double, 2> interval{0.0, 0.0};  // flow-parameter range covered
  FlowClass classification = FlowClass::Unresolved;
  /// Estimated lim f along the curve; +inf when f grows without bound.
  double limit_b = std::numeric_limits<double>::quiet_NaN();
  bool b_unbounded = false;
  int monotonicity_violations = 0;
  std::string note;
};

struct FlowBudget {
  double escape_radius = 200.0;
  double max_arclength = 1e6;
  long max_steps = 200'000;
  double critical_gradient = 1e-7;
  double critical_displacement = 1e-7;
  double abs_tol = 1e-11;
  double rel_tol = 1e-10;
};

/// Integrates the integral curve of grad f through p (forward), parametrised by
/// g-arclength with the flow parameter carried as an extra state.
inline FlowTrace flow_classify(const PotentialField& f, const MetricField& metric, const Point3& p,
                               const FlowBudget& budget = {}) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;  // x(3), flow time
  metric.require_domain(p.vec());

  auto grad_info = [&](const Vec3d& x, Vec3d& up) {
    const Mat3d g = metric.checked_value(x);
    const Mat3d gi = inverse(g);
    up = matvec(gi, f.gradient(Point3(x)));
    return std::sqrt(bilinear(g, up, up));
  };
  auto sys = [&](const State& s, State& ds, double) {
    Vec3d up;
    const double gn = grad_info({s[0], s[1], s[2]}, up);
    for (int k = 0; k < 3; ++k) ds[k] = up[k] / gn;
    ds[3] = 1.0 / gn;
  };

  FlowTrace tr;
  auto push = [&](const State& s) {
    Vec3d up;
    const Vec3d x{s[0], s[1], s[2]};
    const double gn = grad_info(x, up);
    const double fv = f.value(Point3(x));
    if (!tr.samples.empty() && gn > 1e-10 && !(fv > tr.samples.back().f)) ++tr.monotonicity_violations;
    tr.samples.push_back({s[3], Point3(x), fv, gn});
  };

  State s{p.x1, p.x2, p.x3, 0.0};
  push(s);
  if (tr.samples.back().grad_norm < budget.critical_gradient) {
    tr.classification = FlowClass::ConvergeCritical;
    tr.note = "start point is critical";
    return tr;
  }
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(budget.abs_tol, budget.rel_tol);
  double arc = 0.0, ds = 1e-3 * std::max(1.0, p.r());
  long steps = 0;
  for (;;) {
    if (++steps > budget.max_steps || arc > budget.max_arclength) {
      tr.classification = FlowClass::Unresolved;
      tr.note = "budget exhausted";
      break;
    }
    State trial = s;
    double a = arc;
    ode::controlled_step_result res;
    try {
      res = stepper.try_step(sys, trial, a, ds);
    } catch (const DomainError&) {
      ds *= 0.5;
      if (ds < 1e-12) {
        tr.classification = FlowClass::ExitBoundary;
        tr.note = "left the chart";
        break;
      }
      continue;
    } catch (const SingularMetricError&) {
      ds *= 0.5;
      if (ds < 1e-12) {
        tr.classification = FlowClass::ExitBoundary;
        tr.note = "metric degenerates";
        break;
      }
      continue;
    }
    if (res == ode::fail) {
      if (ds < 1e-14) throw StepFailureError("flow step size underflow");
      continue;
    }
    if (!metric.in_domain({trial[0], trial[1], trial[2]})) {
      ds = 0.5 * (a - arc);
      if (ds < 1e-12) {
        tr.classification = FlowClass::ExitBoundary;
        tr.note = "left the chart";
        break;
      }
      continue;
    }
    s = trial;
    arc = a;
    push(s);
    const auto& last = tr.samples.back();
    // Displacement per unit flow time equals |grad f|.
    if (last.grad_norm < budget.critical_gradient && last.grad_norm < budget.critical_displacement) {
      tr.classification = FlowClass::ConvergeCritical;
      tr.note = "gradient below threshold (heuristic)";
      break;
    }
    if (last.x.r() >= budget.escape_radius) {
      tr.classification = FlowClass::EscapeToEnd;
      break;
    }
  }
  tr.interval = {tr.samples.front().t, tr.samples.back().t};

  if (tr.classification == FlowClass::EscapeToEnd) {
    std::vector<double> rs, fs;
    double g_half = std::numeric_limits<double>::quiet_NaN();
    for (const auto& smp : tr.samples) {
      if (smp.x.r() >= 0.25 * budget.escape_radius) {
        rs.push_back(smp.x.r());
        fs.push_back(smp.f);
      }
      if (std::isnan(g_half) && smp.x.r() >= 0.5 * budget.escape_radius) g_half = smp.grad_norm;
    }
    const double g_end = tr.samples.back().grad_norm;
    // |grad f| that has not decayed between R/2 and R signals linear growth.
    if (!(g_end < 0.5 * g_half)) {
      tr.b_unbounded = true;
      tr.limit_b = std::numeric_limits<double>::infinity();
    } else if (rs.size() >= 4) {
      // Thin out to at most 64 samples so the fit stays well conditioned.
      std::vector<double> r2, f2;
      const std::size_t stride = std::max<std::size_t>(1, rs.size() / 64);
      for (std::size_t i = 0; i < rs.size(); i += stride) {
        r2.push_back(rs[i]);
        f2.push_back(fs[i]);
      }
      tr.limit_b = extrapolate_to_infinity(r2, f2, 3);
    } else {
      tr.limit_b = tr.samples.back().f;
    }
  }
  return tr;
}

}  // namespace staticpot
