#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/static_potentials.hpp"

namespace staticpot {

enum class Distinctness { AllDistinct, TwoEqual, AllEqual };

inline const char* to_string(Distinctness d) {
  switch (d) {
    case Distinctness::AllDistinct: return "AllDistinct";
    case Distinctness::TwoEqual: return "TwoEqual";
    case Distinctness::AllEqual: return "AllEqual";
  }
  return "unknown";
}

struct RicciEigenframe {
  std::array<double, 3> eigenvalues{};  // ascending
  std::array<Vec3d, 3> frame{};         // coordinate components, g-orthonormal
  Distinctness distinctness = Distinctness::AllDistinct;
  /// For TwoEqual, the indices of the coincident pair; the remaining index is the simple one.
  std::array<int, 2> equal_pair{-1, -1};
  int simple_index = -1;
};

/// Flip v so that its first component above 1e-12 in magnitude is positive.
inline Vec3d canonical_sign(Vec3d v) {
  for (double c : v) {
    if (std::abs(c) > 1e-12) {
      if (c < 0.0) v = -1.0 * v;
      break;
    }
  }
  return v;
}

/// Eigen-decomposition of Ric relative to g (Ric v = lambda g v) from
/// already-computed tensors.
inline RicciEigenframe eigenframe_from(const Mat3d& ricci, const Mat3d& g, double tau_eig = 1e-6) {
  if (!(tau_eig > 0.0)) throw PreconditionError("eigenvalue threshold must be positive");
  Eigen::Matrix3d a, b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = 0.5 * (ricci[i][j] + ricci[j][i]);
      b(i, j) = g[i][j];
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(a, b);
  if (es.info() != Eigen::Success) throw DegenerateMetricError("generalized eigen-decomposition of Ric failed");
  RicciEigenframe out;
  for (int k = 0; k < 3; ++k) {
    out.eigenvalues[k] = es.eigenvalues()(k);
    out.frame[k] = canonical_sign({es.eigenvectors()(0, k), es.eigenvectors()(1, k), es.eigenvectors()(2, k)});
  }
  const auto& l = out.eigenvalues;
  const double thr = tau_eig * (1.0 + std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])}));
  const double g01 = l[1] - l[0], g12 = l[2] - l[1];
  if (l[2] - l[0] < thr) {
    out.distinctness = Distinctness::AllEqual;
  } else if (g01 < thr || g12 < thr) {
    out.distinctness = Distinctness::TwoEqual;
    if (g01 <= g12) {
      out.equal_pair = {0, 1};
      out.simple_index = 2;
    } else {
      out.equal_pair = {1, 2};
      out.simple_index = 0;
    }
  }
  return out;
}

inline RicciEigenframe ricci_eigenframe(const MetricField& metric, const Point3& p, double tau_eig = 1e-6) {
  const auto c = curvature_at(metric, p);
  return eigenframe_from(c.ricci, c.metric, tau_eig);
}

/// Frame components T(e_a, e_b, e_c) of a covariant 3-tensor.
inline double frame_component(const Tensor3<double>& t, const Vec3d& ea, const Vec3d& eb, const Vec3d& ec) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += ea[i] * eb[j] * ec[k] * t[i][j][k];
  return s;
}

/// The three Tod residuals at p, in the ascending Ricci eigenframe:
///   f (R33;1 - R31;3) - (R22 - R33) f;1
///   f (R11;2 - R12;1) - (R33 - R11) f;2
///   f (R22;3 - R23;2) - (R11 - R22) f;3
inline std::array<double, 3> tod_identity_residuals(const PotentialField& f, const MetricField& metric, const Point3& p,
                                                     const StaticOptions& opts = {}) {
  require_static(f, metric, p, opts);
  const auto rj = ricci_jet_at(metric, p);
  const auto frame = eigenframe_from(rj.curvature.ricci, rj.curvature.metric);
  const auto& e = frame.frame;
  const auto& lam = frame.eigenvalues;
  const auto j = f.jet(p);
  auto fd = [&](int a) { return dot(e[a], j.grad); };
  auto dr = [&](int a, int b, int c) { return frame_component(rj.covariant, e[a], e[b], e[c]); };
  std::array<double, 3> out{};
  // Cyclic (a, c, b): f (R_aa;c - R_ac;a) + ... with a = 3,1,2 and c = 1,2,3 (zero-based).
  const int cyc[3][3] = {{2, 0, 1}, {0, 1, 2}, {1, 2, 0}};
  for (int k = 0; k < 3; ++k) {
    const int a = cyc[k][0], c = cyc[k][1], b = cyc[k][2];
    out[k] = j.value * (dr(a, a, c) - dr(a, c, a)) - (lam[b] - lam[a]) * fd(c);
  }
  return out;
}

/// N Z_;ij + N_;i Z_;j + N_;j Z_;i for Z = f / N.
inline Mat3d quotient_residual(const PotentialField& f, const PotentialField& n, const MetricField& metric,
                               const Point3& p, const StaticOptions& opts = {}) {
  const double nv = n.value(p);
  if (!(nv > 0.0)) throw ZeroPotentialError("N is not positive at " + format_point(p.vec()));
  require_static(f, metric, p, opts);
  require_static(n, metric, p, opts);
  const PotentialField z([f, n](const auto& x) { return f(x) / n(x); }, "quotient");
  const auto gamma = christoffel_at(metric, p);
  const auto zj = z.jet(p);
  const auto nj = n.jet(p);
  const Mat3d hz = covariant_hessian_from(zj, gamma);
  Mat3d out;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = nv * hz[i][k] + nj.grad[i] * zj.grad[k] + nj.grad[k] * zj.grad[i];
  return out;
}

/// Deterministic sample set on a spherical shell.
struct ShellRegion {
  double r_inner = 10.0;
  double r_outer = 20.0;
  int n_radial = 3;
  int n_theta = 6;
  int n_phi = 8;

  std::vector<Point3> points() const {
    std::vector<Point3> out;
    for (int i = 0; i < n_radial; ++i) {
      const double r = n_radial == 1 ? r_inner : r_inner * std::pow(r_outer / r_inner, double(i) / (n_radial - 1));
      for (int t = 0; t < n_theta; ++t) {
        const double th = std::numbers::pi * (t + 0.5) / n_theta;
        for (int k = 0; k < n_phi; ++k) {
          const double ph = 2.0 * std::numbers::pi * (k + 0.37) / n_phi;
          out.emplace_back(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th));
        }
      }
    }
    return out;
  }
};

struct GapScanRow {
  Point3 point;
  std::array<double, 3> eigenvalues{};
  Distinctness distinctness = Distinctness::AllDistinct;
  /// Angle (radians, g-metric) between the simple eigenvector and the radial
  /// direction; NaN unless TwoEqual.
  double radial_deviation = std::numeric_limits<double>::quiet_NaN();
};

struct GapScanReport {
  std::vector<GapScanRow> rows;
  int all_distinct = 0;
  int two_equal = 0;
  int all_equal = 0;
  double max_radial_deviation = 0.0;

  double fraction_distinct() const { return rows.empty() ? 0.0 : double(all_distinct) / rows.size(); }
};

inline GapScanReport eigenvalue_gap_scan(const MetricField& metric, const std::vector<Point3>& points,
                                         double tau_eig = 1e-6) {
  if (points.empty()) throw PreconditionError("eigenvalue scan region is empty");
  GapScanReport rep;
  for (const auto& p : points) {
    const auto c = curvature_at(metric, p);
    const auto fr = eigenframe_from(c.ricci, c.metric, tau_eig);
    GapScanRow row;
    row.point = p;
    row.eigenvalues = fr.eigenvalues;
    row.distinctness = fr.distinctness;
    switch (fr.distinctness) {
      case Distinctness::AllDistinct: ++rep.all_distinct; break;
      case Distinctness::AllEqual: ++rep.all_equal; break;
      case Distinctness::TwoEqual: {
        ++rep.two_equal;
        const Vec3d& e = fr.frame[fr.simple_index];
        const Vec3d x = p.vec();
        const double cosang = std::abs(bilinear(c.metric, e, x)) /
                              std::sqrt(bilinear(c.metric, e, e) * bilinear(c.metric, x, x));
        row.radial_deviation = std::acos(std::min(1.0, cosang));
        rep.max_radial_deviation = std::max(rep.max_radial_deviation, row.radial_deviation);
        break;
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace staticpot
