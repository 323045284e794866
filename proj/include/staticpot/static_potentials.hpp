#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/core/fit.hpp"
#include "staticpot/core/jet_function.hpp"
#include "staticpot/expression.hpp"
#include "staticpot/quadrature.hpp"

namespace staticpot {

/// Closed-form scalar field with exact derivatives through dual numbers.
class PotentialField {
 public:
  PotentialField() = default;

  template <class F>
  PotentialField(F f, std::string name, std::optional<Vec3d> linear_part = std::nullopt)
      : f_(std::move(f)), name_(std::move(name)), linear_part_(linear_part) {}

  /// f = a0 + a1 x1 + a2 x2 + a3 x3.
  static PotentialField affine(double a0, double a1, double a2, double a3) {
    return PotentialField(
        [=](const auto& x) { return a0 + a1 * x[0] + a2 * x[1] + a3 * x[2]; },
        "affine(" + fmt(a0) + "," + fmt(a1) + "," + fmt(a2) + "," + fmt(a3) + ")", Vec3d{a1, a2, a3});
  }

  /// Lapse of the isotropic Schwarzschild metric, (1 - m/2r)/(1 + m/2r).
  static PotentialField schwarzschild_N(double m) {
    return PotentialField(
        [m](const auto& x) {
          using std::sqrt;
          const auto r = sqrt(dot(x, x));
          const auto u = m / (2.0 * r);
          return (1.0 - u) / (1.0 + u);
        },
        "schwarzschild_N(" + fmt(m) + ")", Vec3d{0.0, 0.0, 0.0});
  }

  static PotentialField custom(const std::string& expression) {
    const Expression e = Expression::parse(expression);
    return PotentialField([e](const auto& x) { return e(x); }, "custom(" + expression + ")");
  }

  /// alpha f + beta g.
  static PotentialField combine(double alpha, const PotentialField& f, double beta, const PotentialField& g) {
    std::optional<Vec3d> lp;
    if (f.linear_part_ && g.linear_part_) lp = alpha * *f.linear_part_ + beta * *g.linear_part_;
    return PotentialField([=](const auto& x) { return alpha * f(x) + beta * g(x); },
                          fmt(alpha) + "*" + f.name_ + "+" + fmt(beta) + "*" + g.name_, lp);
  }

  PotentialField scaled(double c) const {
    auto self = *this;
    std::optional<Vec3d> lp;
    if (linear_part_) lp = c * *linear_part_;
    return PotentialField([self, c](const auto& x) { return c * self(x); }, fmt(c) + "*" + name_, lp);
  }

  template <class S>
  S operator()(const Vec3<S>& x) const {
    return f_(x);
  }

  const std::string& name() const { return name_; }
  const std::optional<Vec3d>& linear_part() const { return linear_part_; }

  double value(const Point3& p) const { return f_(p.vec()); }
  ScalarJet2 jet(const Point3& p) const { return scalar_jet(f_, p.vec()); }
  Vec3d gradient(const Point3& p) const { return jet(p).grad; }
  Mat3d hessian(const Point3& p) const { return jet(p).hess; }

  /// f - sum a_i x_i when the linear part is known.
  std::optional<double> remainder(const Point3& p) const {
    if (!linear_part_) return std::nullopt;
    return value(p) - dot(*linear_part_, p.vec());
  }

  const ScalarJetFunction& function() const { return f_; }

 private:
  static std::string fmt(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  ScalarJetFunction f_;
  std::string name_;
  std::optional<Vec3d> linear_part_;
};

/// f'(y) = f(Q^T y) in the rotated chart y = Q x.
inline PotentialField rotate_potential(const PotentialField& f, const Mat3d& q) {
  const Mat3d qt = transpose(q);
  std::optional<Vec3d> lp;
  if (f.linear_part()) lp = matvec(q, *f.linear_part());
  return PotentialField(
      [f, qt](const auto& y) {
        using S = std::decay_t<decltype(y[0])>;
        Vec3<S> x{S(0.0), S(0.0), S(0.0)};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) x[i] += qt[i][j] * y[j];
        return f(x);
      },
      "rotated(" + f.name() + ")", lp);
}

/// f_;ij = d_i d_j f - Gamma^k_ij d_k f.
inline Mat3d covariant_hessian_from(const ScalarJet2& j, const Tensor3<double>& gamma) {
  Mat3d h = j.hess;
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int k = 0; k < 3; ++k) h[i][jj] -= gamma[k][i][jj] * j.grad[k];
  return h;
}

inline Mat3d covariant_hessian(const PotentialField& f, const MetricField& metric, const Point3& p) {
  return covariant_hessian_from(f.jet(p), christoffel_at(metric, p));
}

struct StaticResidual {
  Mat3d tensor_residual{};      // f_;ij - f R_ij
  double laplacian_residual = 0.0;  // Laplacian of f
  double combined_norm = 0.0;
};

inline StaticResidual static_residual_from(const ScalarJet2& j, const CurvatureBundle& c) {
  const Mat3d h = covariant_hessian_from(j, c.gamma);
  StaticResidual r;
  r.tensor_residual = h - j.value * c.ricci;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r.laplacian_residual += c.inverse_metric[a][b] * h[a][b];
  r.combined_norm = frobenius_norm(r.tensor_residual) + std::abs(r.laplacian_residual);
  return r;
}

inline StaticResidual static_residual(const PotentialField& f, const MetricField& metric, const Point3& p) {
  return static_residual_from(f.jet(p), curvature_at(metric, p));
}

struct StaticOptions {
  /// Static when combined_norm < threshold * (1 + |f|).
  double threshold = 1e-6;
};

inline bool is_static_at(const PotentialField& f, const MetricField& metric, const Point3& p,
                         const StaticOptions& opts = {}) {
  const auto r = static_residual(f, metric, p);
  return r.combined_norm < opts.threshold * (1.0 + std::abs(f.value(p)));
}

inline void require_static(const PotentialField& f, const MetricField& metric, const Point3& p,
                           const StaticOptions& opts = {}) {
  const auto r = static_residual(f, metric, p);
  const double bound = opts.threshold * (1.0 + std::abs(f.value(p)));
  if (!(r.combined_norm < bound))
    throw NotStaticError("potential '" + f.name() + "' is not static at " + format_point(p.vec()) +
                         " (residual " + std::to_string(r.combined_norm) + " >= " + std::to_string(bound) + ")");
}

/// 1/2 Lap |df|^2 - |Hess f|^2 - 1/(2f) <df, d|df|^2>, which vanishes for
/// static potentials.
inline double bochner_residual(const PotentialField& f, const MetricField& metric, const Point3& p,
                               const StaticOptions& opts = {}) {
  const double fv = f.value(p);
  if (std::abs(fv) < 1e-10) throw ZeroPotentialError("potential vanishes at " + format_point(p.vec()));
  require_static(f, metric, p, opts);

  const Vec3d x = p.vec();
  const D3 f3 = f(seeded_point<D3>(x));
  const Mat3<D2> g2 = metric(seeded_point<D2>(x));
  const Mat3<D2> ginv2 = inverse(g2);
  D2 u(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) u = u + ginv2[i][j] * f3.d[i] * f3.d[j];

  const auto c = curvature_at(metric, p);
  ScalarJet2 fj;
  fj.value = fv;
  ScalarJet2 uj;
  uj.value = u.v.v;
  for (int a = 0; a < 3; ++a) {
    fj.grad[a] = f3.d[a].v.v;
    uj.grad[a] = u.d[a].v;
    for (int b = 0; b < 3; ++b) {
      fj.hess[a][b] = f3.d[a].d[b].v;
      uj.hess[a][b] = u.d[a].d[b];
    }
  }
  const Mat3d hf = covariant_hessian_from(fj, c.gamma);
  const Mat3d hu = covariant_hessian_from(uj, c.gamma);
  const Mat3d& gi = c.inverse_metric;
  double lap_u = 0.0, hess_sq = 0.0, df_du = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      lap_u += gi[a][b] * hu[a][b];
      df_du += gi[a][b] * fj.grad[a] * uj.grad[b];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hess_sq += gi[a][i] * gi[b][j] * hf[a][b] * hf[i][j];
    }
  return 0.5 * lap_u - hess_sq - 0.5 * df_du / fv;
}

struct LinearPartFit {
  Vec3d a{};
  /// Sphere averages of d_i f per radius, rows aligned with `radii`.
  std::vector<Vec3d> sphere_averages;
  std::vector<double> radii;
  /// Log-log slope of max |f - a.x| over the sample spheres.
  double remainder_exponent = 0.0;
  std::vector<double> remainder_max;
};

struct LinearPartOptions {
  int n_theta = 32;
  int n_phi = 64;
  /// Successive sphere averages may differ by at most this much.
  double trend_tolerance = 0.1;
};

/// a_i as the limit of sphere averages of d_i f, extrapolated in 1/r.
inline LinearPartFit fit_linear_part(const PotentialField& f, const MetricField& metric,
                                     const std::vector<double>& radii, const LinearPartOptions& opts = {}) {
  if (radii.size() < 3) throw PreconditionError("fit_linear_part needs at least three radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw PreconditionError("fit_linear_part radii must increase");
  const SphereRule rule(opts.n_theta, opts.n_phi);
  LinearPartFit out;
  out.radii = radii;
  for (double r : radii) {
    Vec3d avg{0.0, 0.0, 0.0};
    for (const auto& nd : rule.nodes) {
      const Vec3d x = r * nd.n;
      metric.require_domain(x);
      const D1 v = f(seeded_point<D1>(x));
      for (int i = 0; i < 3; ++i) avg[i] += nd.weight * v.d[i];
    }
    out.sphere_averages.push_back((1.0 / (4.0 * std::numbers::pi)) * avg);
  }
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const Vec3d d = out.sphere_averages[k] - out.sphere_averages[k - 1];
    const double jump = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
    if (jump > opts.trend_tolerance)
      throw NonConvergentError("sphere averages of the gradient change by " + std::to_string(jump) + " between r = " +
                               std::to_string(radii[k - 1]) + " and r = " + std::to_string(radii[k]));
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<double> y;
    for (const auto& s : out.sphere_averages) y.push_back(s[i]);
    out.a[i] = extrapolate_to_infinity(radii, y, 2);
  }
  for (double r : radii) {
    double mx = 0.0;
    for (const auto& nd : rule.nodes) {
      const Vec3d x = r * nd.n;
      mx = std::max(mx, std::abs(f.value(Point3(x)) - dot(out.a, x)));
    }
    out.remainder_max.push_back(mx);
  }
  out.remainder_exponent = loglog_slope(radii, out.remainder_max);
  return out;
}

}  // namespace staticpot
