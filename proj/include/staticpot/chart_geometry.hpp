#pragma once

// Coordinate charts, metric families and the curvature engine.
//
// Curvature convention: R^d_abc is defined by
//     (nabla_b nabla_c - nabla_c nabla_b) d_a = R^d_abc d_d,
// so that R^d_abc = d_b G^d_ca - d_c G^d_ba + G^d_be G^e_ca - G^d_ce G^e_ba,
// Ric_ac = R^b_abc and the round sphere has positive Ricci curvature. With this
// convention the Ricci identity reads f_;abc - f_;acb = R^d_abc f_;d.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "staticpot/core/dual.hpp"
#include "staticpot/core/errors.hpp"
#include "staticpot/core/jet_function.hpp"
#include "staticpot/core/tensor.hpp"

namespace staticpot {

/// A chart point; r is derived on demand.
struct Point3 {
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;

  Point3() = default;
  Point3(double a, double b, double c) : x1(a), x2(b), x3(c) {}
  explicit Point3(const Vec3d& v) : x1(v[0]), x2(v[1]), x3(v[2]) {}

  Vec3d vec() const { return {x1, x2, x3}; }
  double r() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
};

enum class MetricFamily { Euclidean, SchwarzschildIsotropic, PerturbedAS, GenericCoordinate };

inline const char* to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::Euclidean: return "euclidean";
    case MetricFamily::SchwarzschildIsotropic: return "schwarzschild";
    case MetricFamily::PerturbedAS: return "perturbed_as";
    case MetricFamily::GenericCoordinate: return "generic";
  }
  return "unknown";
}

/// One term c * r^-2 * n_a * n_b added to p_ij (and p_ji), where n = x/r and
/// the angular index 0 stands for the constant 1. Every such term is O_2(r^-2).
struct PerturbationTerm {
  int i = 0;
  int j = 0;
  double coefficient = 0.0;
  int a = 0;
  int b = 0;
};

template <class S>
Mat3<S> perturbation_tensor(const std::vector<PerturbationTerm>& terms, const Vec3<S>& x) {
  using std::sqrt;
  Mat3<S> p = zero_matrix<S>();
  if (terms.empty()) return p;
  const S r2 = dot(x, x);
  const S r = sqrt(r2);
  const Vec3<S> n{x[0] / r, x[1] / r, x[2] / r};
  for (const auto& t : terms) {
    S mono(t.coefficient);
    if (t.a > 0) mono = mono * n[t.a - 1];
    if (t.b > 0) mono = mono * n[t.b - 1];
    mono = mono / r2;
    p[t.i][t.j] += mono;
    if (t.i != t.j) p[t.j][t.i] += mono;
  }
  return p;
}

/// Coordinate metric g_ij(x) on (a region of) R^3 with its decay-class tag.
/// Immutable; evaluation is a pure function of the point and may be
/// instantiated at any of the dual scalar types.
class MetricField {
 public:
  using Domain = std::function<bool(const Vec3d&)>;

  static MetricField euclidean() {
    MetricField g;
    g.family_ = MetricFamily::Euclidean;
    g.name_ = "euclidean";
    g.eval_ = MatrixJetFunction([](const auto& x) {
      using S = std::decay_t<decltype(x[0])>;
      return identity_matrix<S>();
    });
    return g;
  }

  /// (1 + m/2r)^4 delta_ij. The exterior chart is r > |m|/2; with
  /// `full_manifold` and m > 0 the chart is r > 0 (both ends).
  static MetricField schwarzschild(double m, bool full_manifold = false) {
    MetricField g;
    g.family_ = MetricFamily::SchwarzschildIsotropic;
    g.mass_ = m;
    g.name_ = "schwarzschild";
    g.inner_radius_ = (full_manifold && m > 0.0) ? 0.0 : std::abs(m) / 2.0;
    g.eval_ = MatrixJetFunction([m](const auto& x) {
      using S = std::decay_t<decltype(x[0])>;
      using std::sqrt;
      const S r = sqrt(dot(x, x));
      const S phi = 1.0 + m / (2.0 * r);
      const S phi2 = phi * phi;
      const S c = phi2 * phi2;
      Mat3<S> out = zero_matrix<S>();
      for (int i = 0; i < 3; ++i) out[i][i] = c;
      return out;
    });
    return g;
  }

  /// (1 + m/2r)^4 delta_ij + p_ij with p a finite sum of PerturbationTerm.
  static MetricField perturbed_as(double m, std::vector<PerturbationTerm> terms, double inner_radius) {
    for (const auto& t : terms) {
      if (t.i < 0 || t.i > 2 || t.j < 0 || t.j > 2 || t.a < 0 || t.a > 3 || t.b < 0 || t.b > 3)
        throw ConfigError("perturbation term index out of range");
    }
    MetricField g;
    g.family_ = MetricFamily::PerturbedAS;
    g.mass_ = m;
    g.name_ = "perturbed_as";
    g.inner_radius_ = std::max(inner_radius, std::abs(m) / 2.0);
    g.terms_ = terms;
    g.eval_ = MatrixJetFunction([m, terms = std::move(terms)](const auto& x) {
      using S = std::decay_t<decltype(x[0])>;
      using std::sqrt;
      const S r = sqrt(dot(x, x));
      const S phi = 1.0 + m / (2.0 * r);
      const S phi2 = phi * phi;
      const S c = phi2 * phi2;
      Mat3<S> out = perturbation_tensor(terms, x);
      for (int i = 0; i < 3; ++i) out[i][i] += c;
      return out;
    });
    return g;
  }

  /// Arbitrary closed-form metric given as a generic callable of Vec3<S>.
  template <class F>
  static MetricField generic(F f, std::string name, Domain domain = {}, double tau = 1.0, double mass = 0.0) {
    MetricField g;
    g.family_ = MetricFamily::GenericCoordinate;
    g.name_ = std::move(name);
    g.eval_ = MatrixJetFunction(std::move(f));
    g.domain_ = std::move(domain);
    g.tau_ = tau;
    g.mass_ = mass;
    return g;
  }

  MetricFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  double mass() const { return mass_; }
  double tau() const { return tau_; }
  double inner_radius() const { return inner_radius_; }
  const std::vector<PerturbationTerm>& perturbation() const { return terms_; }
  const Mat3d& rotation() const { return rotation_; }

  bool in_domain(const Vec3d& p) const {
    for (double c : p)
      if (!std::isfinite(c)) return false;
    if (norm(p) <= inner_radius_) return false;
    if (domain_ && !domain_(p)) return false;
    return true;
  }

  void require_domain(const Vec3d& p) const {
    if (!in_domain(p))
      throw DomainError("point " + format_point(p) + " lies outside the chart of metric '" + name_ + "'");
  }

  template <class S>
  Mat3<S> operator()(const Vec3<S>& x) const {
    return eval_(x);
  }

  /// Metric value at p after the domain and positive-definiteness checks.
  Mat3d checked_value(const Vec3d& p) const {
    require_domain(p);
    Mat3d g = eval_(p);
    check_positive_definite(g, p);
    return g;
  }

  static void check_positive_definite(const Mat3d& g, const Vec3d& p) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = g[i][j];
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw SingularMetricError("metric is not symmetric at " + format_point(p));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 1e-10))
      throw SingularMetricError("metric is not positive definite at " + format_point(p) +
                                " (smallest eigenvalue " + std::to_string(es.eigenvalues()(0)) + ")");
  }

 private:
  friend MetricField rotate_chart(const MetricField& metric, const Mat3d& rotation);
  template <class F>
  friend MetricField transform_metric(const MetricField& base, std::string name, F f);

  MetricFamily family_ = MetricFamily::Euclidean;
  std::string name_;
  double mass_ = 0.0;
  double tau_ = 1.0;
  double inner_radius_ = 0.0;
  std::vector<PerturbationTerm> terms_;
  Mat3d rotation_ = identity_matrix<double>();
  Domain domain_;
  MatrixJetFunction eval_;
};

/// New metric on the same chart and domain whose components are
/// f(x, base(x)); the result is tagged GenericCoordinate.
template <class F>
MetricField transform_metric(const MetricField& base, std::string name, F f) {
  MetricField g;
  g.family_ = MetricFamily::GenericCoordinate;
  g.name_ = std::move(name);
  g.mass_ = base.mass_;
  g.tau_ = base.tau_;
  g.inner_radius_ = base.inner_radius_;
  g.domain_ = base.domain_;
  g.eval_ = MatrixJetFunction([base, f](const auto& x) { return f(x, base(x)); });
  return g;
}

// ---------------------------------------------------------------------------
// Curvature engine

/// g, dg[k][i][j] = d_k g_ij and ddg[k][l][i][j] = d_k d_l g_ij at one point.
template <class T>
struct MetricJet {
  Mat3<T> g;
  Tensor3<T> dg;
  Tensor4<T> ddg;
};

/// Unpacks a metric evaluated at a twice-nested dual point.
template <class T>
MetricJet<T> metric_jet_from(const Mat3<Dual<Dual<T>>>& m) {
  MetricJet<T> jet;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      jet.g[i][j] = m[i][j].v.v;
      for (int k = 0; k < 3; ++k) {
        jet.dg[k][i][j] = m[i][j].d[k].v;
        for (int l = 0; l < 3; ++l) jet.ddg[k][l][i][j] = m[i][j].d[k].d[l];
      }
    }
  return jet;
}

template <class T>
struct CurvatureT {
  Mat3<T> metric;
  Mat3<T> inverse_metric;
  Tensor3<T> gamma;    // gamma[k][i][j] = Gamma^k_ij
  Tensor4<T> riemann;  // riemann[d][a][b][c] = R^d_abc
  Mat3<T> ricci;
  T scalar;
};

using CurvatureBundle = CurvatureT<double>;
using Riemann = Tensor4<double>;

/// Christoffel symbols of the second kind from g and its first derivatives.
template <class T>
Tensor3<T> christoffel(const Mat3<T>& ginv, const Tensor3<T>& dg) {
  Tensor3<T> gamma;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s(0.0);
        for (int l = 0; l < 3; ++l) s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        gamma[k][i][j] = 0.5 * s;
      }
  return gamma;
}

/// Full curvature from a second-order metric jet. T is double for plain
/// curvature, or D1 when the jet itself carries one more derivative.
template <class T>
CurvatureT<T> curvature_from_jet(const MetricJet<T>& jet) {
  CurvatureT<T> c;
  c.metric = jet.g;
  c.inverse_metric = inverse(jet.g);
  const auto& ginv = c.inverse_metric;

  Tensor3<T> dginv;  // dginv[m][k][l] = d_m g^kl
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        T s(0.0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) s += ginv[k][a] * jet.dg[m][a][b] * ginv[b][l];
        dginv[m][k][l] = -s;
      }

  Tensor3<T> first_kind;  // first_kind[l][i][j] = Gamma_lij
  Tensor4<T> dfirst;      // dfirst[m][l][i][j] = d_m Gamma_lij
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        first_kind[l][i][j] = 0.5 * (jet.dg[i][j][l] + jet.dg[j][i][l] - jet.dg[l][i][j]);
        for (int m = 0; m < 3; ++m)
          dfirst[m][l][i][j] = 0.5 * (jet.ddg[m][i][j][l] + jet.ddg[m][j][i][l] - jet.ddg[m][l][i][j]);
      }

  Tensor4<T> dgamma;  // dgamma[m][k][i][j] = d_m Gamma^k_ij
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s(0.0);
        for (int l = 0; l < 3; ++l) s += ginv[k][l] * first_kind[l][i][j];
        c.gamma[k][i][j] = s;
        for (int m = 0; m < 3; ++m) {
          T ds(0.0);
          for (int l = 0; l < 3; ++l) ds += dginv[m][k][l] * first_kind[l][i][j] + ginv[k][l] * dfirst[m][l][i][j];
          dgamma[m][k][i][j] = ds;
        }
      }

  for (int d = 0; d < 3; ++d)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int cc = 0; cc < 3; ++cc) {
          T s = dgamma[b][d][cc][a] - dgamma[cc][d][b][a];
          for (int e = 0; e < 3; ++e) s += c.gamma[d][b][e] * c.gamma[e][cc][a] - c.gamma[d][cc][e] * c.gamma[e][b][a];
          c.riemann[d][a][b][cc] = s;
        }

  c.scalar = T(0.0);
  for (int a = 0; a < 3; ++a)
    for (int cc = 0; cc < 3; ++cc) {
      T s(0.0);
      for (int b = 0; b < 3; ++b) s += c.riemann[b][a][b][cc];
      c.ricci[a][cc] = s;
    }
  for (int a = 0; a < 3; ++a)
    for (int cc = 0; cc < 3; ++cc) c.scalar += ginv[a][cc] * c.ricci[a][cc];
  return c;
}

enum class Backend { DualNumber, FiniteDifference };

struct CurvatureOptions {
  Backend backend = Backend::DualNumber;
  /// Finite-difference step is fd_step_scale * max(1, r).
  double fd_step_scale = 1e-4;
};

namespace detail {

inline MetricJet<double> finite_difference_jet(const MetricField& metric, const Vec3d& p, double h) {
  auto at = [&](double s0, int i0, double s1, int i1) {
    Vec3d q = p;
    if (i0 >= 0) q[i0] += s0 * h;
    if (i1 >= 0) q[i1] += s1 * h;
    return metric(q);
  };
  MetricJet<double> jet;
  jet.g = metric(p);
  std::array<Mat3d, 3> plus, minus;
  for (int k = 0; k < 3; ++k) {
    plus[k] = at(1, k, 0, -1);
    minus[k] = at(-1, k, 0, -1);
  }
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        jet.dg[k][i][j] = (plus[k][i][j] - minus[k][i][j]) / (2.0 * h);
        jet.ddg[k][k][i][j] = (plus[k][i][j] - 2.0 * jet.g[i][j] + minus[k][i][j]) / (h * h);
      }
  for (int k = 0; k < 3; ++k)
    for (int l = k + 1; l < 3; ++l) {
      const Mat3d pp = at(1, k, 1, l), pm = at(1, k, -1, l), mp = at(-1, k, 1, l), mm = at(-1, k, -1, l);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double v = (pp[i][j] - pm[i][j] - mp[i][j] + mm[i][j]) / (4.0 * h * h);
          jet.ddg[k][l][i][j] = v;
          jet.ddg[l][k][i][j] = v;
        }
    }
  return jet;
}

}  // namespace detail

/// Christoffel symbols, Riemann and Ricci tensors and scalar curvature at p.
inline CurvatureBundle curvature_at(const MetricField& metric, const Point3& p, const CurvatureOptions& opts = {}) {
  const Vec3d x = p.vec();
  metric.checked_value(x);
  if (opts.backend == Backend::DualNumber) {
    return curvature_from_jet(metric_jet_from(metric(seeded_point<D2>(x))));
  }
  if (!(opts.fd_step_scale > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const double h = opts.fd_step_scale * std::max(1.0, p.r());
  for (int k = 0; k < 3; ++k)
    for (double s : {-1.0, 1.0}) {
      Vec3d q = x;
      q[k] += s * h;
      metric.require_domain(q);
    }
  return curvature_from_jet(detail::finite_difference_jet(metric, x, h));
}

/// Christoffel symbols only (first metric derivatives).
inline Tensor3<double> christoffel_at(const MetricField& metric, const Point3& p) {
  const Vec3d x = p.vec();
  metric.checked_value(x);
  const Mat3<D1> g = metric(seeded_point<D1>(x));
  Mat3d gv;
  Tensor3<double> dg;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gv[i][j] = g[i][j].v;
      for (int k = 0; k < 3; ++k) dg[k][i][j] = g[i][j].d[k];
    }
  return christoffel(inverse(gv), dg);
}

/// Ricci tensor with its coordinate gradient and covariant derivative.
struct RicciJet {
  CurvatureBundle curvature;
  Tensor3<double> dricci;      // dricci[c][a][b] = d_c R_ab
  Tensor3<double> covariant;   // covariant[a][b][c] = R_ab;c
};

inline RicciJet ricci_jet_at(const MetricField& metric, const Point3& p) {
  const Vec3d x = p.vec();
  metric.checked_value(x);
  const auto c1 = curvature_from_jet(metric_jet_from(metric(seeded_point<D3>(x))));
  RicciJet out;
  auto& c = out.curvature;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      c.metric[i][j] = c1.metric[i][j].v;
      c.inverse_metric[i][j] = c1.inverse_metric[i][j].v;
      c.ricci[i][j] = c1.ricci[i][j].v;
      for (int k = 0; k < 3; ++k) {
        c.gamma[k][i][j] = c1.gamma[k][i][j].v;
        out.dricci[k][i][j] = c1.ricci[i][j].d[k];
        for (int l = 0; l < 3; ++l) c.riemann[k][i][j][l] = c1.riemann[k][i][j][l].v;
      }
    }
  c.scalar = c1.scalar.v;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc) {
        double s = out.dricci[cc][a][b];
        for (int d = 0; d < 3; ++d) s -= c.gamma[d][cc][a] * c.ricci[d][b] + c.gamma[d][cc][b] * c.ricci[a][d];
        out.covariant[a][b][cc] = s;
      }
  return out;
}

/// Three-dimensional Riemann tensor rebuilt from Ricci, scalar curvature and g:
/// R^d_abc = d^d_b R_ac - d^d_c R_ab + g_ac R^d_b - g_ab R^d_c + R/2 (d^d_c g_ab - d^d_b g_ac).
inline Riemann reconstruct_riemann_from_ricci(const Mat3d& ricci, double scalar, const Mat3d& g) {
  MetricField::check_positive_definite(g, {0.0, 0.0, 0.0});
  const Mat3d ginv = inverse(g);
  const Mat3d mixed = matmul(ginv, ricci);  // R^d_b
  Riemann r;
  for (int d = 0; d < 3; ++d)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          r[d][a][b][c] = kronecker(d, b) * ricci[a][c] - kronecker(d, c) * ricci[a][b] + g[a][c] * mixed[d][b] -
                          g[a][b] * mixed[d][c] +
                          0.5 * scalar * (kronecker(d, c) * g[a][b] - kronecker(d, b) * g[a][c]);
  return r;
}

/// Sectional curvature of the plane spanned by u and w.
inline double sectional_curvature(const CurvatureBundle& c, const Vec3d& u, const Vec3d& w) {
  double num = 0.0;
  for (int d = 0; d < 3; ++d)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int cc = 0; cc < 3; ++cc) {
          const double rv = c.riemann[d][a][b][cc];
          if (rv == 0.0) continue;
          double xd = 0.0;
          for (int e = 0; e < 3; ++e) xd += c.metric[d][e] * u[e];
          num += xd * w[a] * u[b] * w[cc] * rv;
        }
  const double uu = bilinear(c.metric, u, u), ww = bilinear(c.metric, w, w), uw = bilinear(c.metric, u, w);
  return num / (uu * ww - uw * uw);
}

/// |Ric|^2 = g^ia g^jb R_ij R_ab.
inline double ricci_norm_squared(const CurvatureBundle& c) {
  const Mat3d mixed = matmul(c.inverse_metric, c.ricci);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += mixed[i][j] * mixed[j][i];
  return s;
}

/// Chart y = Q x. Components transform as g'(y) = Q g(Q^T y) Q^T; mass, tau,
/// family and domain carry over.
inline MetricField rotate_chart(const MetricField& metric, const Mat3d& rotation) {
  const Mat3d qtq = matmul(transpose(rotation), rotation);
  if (max_abs(qtq - identity_matrix<double>()) > 1e-12)
    throw NotOrthogonalError("rotation matrix is not orthogonal within 1e-12");
  MetricField g = metric;
  g.rotation_ = matmul(rotation, metric.rotation_);
  const Mat3d q = rotation;
  const Mat3d qt = transpose(rotation);
  g.eval_ = MatrixJetFunction([metric, q, qt](const auto& y) {
    using S = std::decay_t<decltype(y[0])>;
    Vec3<S> x{S(0.0), S(0.0), S(0.0)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) x[i] += qt[i][j] * y[j];
    const Mat3<S> gx = metric(x);
    Mat3<S> out = zero_matrix<S>();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) out[a][b] += q[a][i] * gx[i][j] * q[b][j];
    return out;
  });
  if (metric.domain_) {
    auto inner = metric.domain_;
    g.domain_ = [inner, qt](const Vec3d& y) { return inner(matvec(qt, y)); };
  }
  return g;
}

/// Rotation about the given axis (0, 1, 2) by angle radians.
inline Mat3d axis_rotation(int axis, double angle) {
  Mat3d r = identity_matrix<double>();
  const int i = (axis + 1) % 3, j = (axis + 2) % 3;
  r[i][i] = std::cos(angle);
  r[i][j] = -std::sin(angle);
  r[j][i] = std::sin(angle);
  r[j][j] = std::cos(angle);
  return r;
}

/// Orthogonal matrix Q with Q * (a/|a|) = e_1, so that in y = Q x the
/// direction a becomes the first axis.
inline Mat3d align_to_first_axis(const Vec3d& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw PreconditionError("cannot align a zero vector");
  const Vec3d e1 = (1.0 / n) * a;
  // Pick the coordinate axis least aligned with e1 to seed Gram-Schmidt.
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(e1[i]) < std::abs(e1[k])) k = i;
  Vec3d t{0.0, 0.0, 0.0};
  t[k] = 1.0;
  Vec3d e2 = t - dot(t, e1) * e1;
  e2 = (1.0 / norm(e2)) * e2;
  const Vec3d e3{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]};
  return {{{e1[0], e1[1], e1[2]}, {e2[0], e2[1], e2[2]}, {e3[0], e3[1], e3[2]}}};
}

/// Declarative description of a metric family, as read from configuration.
struct MetricSpec {
  MetricFamily family = MetricFamily::Euclidean;
  double mass = 0.0;
  double tau = 1.0;
  bool full_manifold = false;
  double inner_radius = 0.0;
  std::vector<PerturbationTerm> perturbation;
};

inline MetricField make_metric(const MetricSpec& spec) {
  if (!(spec.tau > 0.5 && spec.tau <= 1.0)) throw ConfigError("decay exponent tau must lie in (1/2, 1]");
  switch (spec.family) {
    case MetricFamily::Euclidean:
      return MetricField::euclidean();
    case MetricFamily::SchwarzschildIsotropic:
      return MetricField::schwarzschild(spec.mass, spec.full_manifold);
    case MetricFamily::PerturbedAS:
      return MetricField::perturbed_as(spec.mass, spec.perturbation, spec.inner_radius);
    case MetricFamily::GenericCoordinate:
      break;
  }
  throw ConfigError("generic metrics cannot be built from a declarative spec");
}

}  // namespace staticpot
