#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/core/fit.hpp"
#include "staticpot/static_potentials.hpp"

namespace staticpot {

using Vec2d = std::array<double, 2>;
using Mat2d = std::array<std::array<double, 2>, 2>;

namespace detail {

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline Vec3d unit_axis(int i) {
  Vec3d e{0.0, 0.0, 0.0};
  e[i] = 1.0;
  return e;
}

/// |df|_g from a coordinate gradient.
inline double grad_norm(const Mat3d& ginv, const Vec3d& df) { return std::sqrt(bilinear(ginv, df, df)); }

// Fourth-order central stencils.
inline double d1(double m2, double m1, double p1, double p2, double h) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h); }
inline double d2(double m2, double m1, double c, double p1, double p2, double h) {
  return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
}

}  // namespace detail

/// Gaussian curvature by the Brioschi formula from E, F, G and their
/// first and second derivatives in a (u, v) chart.
inline double brioschi(double E, double F, double G, double Eu, double Ev, double Fu, double Fv, double Gu, double Gv,
                       double Evv, double Fuv, double Guu) {
  const Eigen::Matrix3d m1{{-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev}, {Fv - 0.5 * Gu, E, F}, {0.5 * Gv, F, G}};
  const Eigen::Matrix3d m2{{0.0, 0.5 * Ev, 0.5 * Gu}, {0.5 * Ev, E, F}, {0.5 * Gu, F, G}};
  const double det = E * G - F * F;
  return (m1.determinant() - m2.determinant()) / (det * det);
}

/// K on a uniform (u, v) grid of first fundamental form samples, periodic in v.
/// Rows closer than two nodes to either u end are left NaN.
inline std::vector<std::vector<double>> brioschi_grid(const std::vector<std::vector<Vec3d>>& efg, double hu, double hv) {
  const int nu = static_cast<int>(efg.size());
  const int nv = nu ? static_cast<int>(efg[0].size()) : 0;
  std::vector<std::vector<double>> k(nu, std::vector<double>(nv, detail::nan()));
  if (nv < 5) return k;
  auto at = [&](int i, int j, int c) { return efg[i][((j % nv) + nv) % nv][c]; };
  auto du = [&](int i, int j, int c) { return detail::d1(at(i - 2, j, c), at(i - 1, j, c), at(i + 1, j, c), at(i + 2, j, c), hu); };
  auto dv = [&](int i, int j, int c) { return detail::d1(at(i, j - 2, c), at(i, j - 1, c), at(i, j + 1, c), at(i, j + 2, c), hv); };
  for (int i = 2; i + 2 < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double E = at(i, j, 0), F = at(i, j, 1), G = at(i, j, 2);
      const double Evv = detail::d2(at(i, j - 2, 0), at(i, j - 1, 0), E, at(i, j + 1, 0), at(i, j + 2, 0), hv);
      const double Guu = detail::d2(at(i - 2, j, 2), at(i - 1, j, 2), G, at(i + 1, j, 2), at(i + 2, j, 2), hu);
      const double Fuv = detail::d1(dv(i - 2, j, 1), dv(i - 1, j, 1), dv(i + 1, j, 1), dv(i + 2, j, 1), hu);
      k[i][j] = brioschi(E, F, G, du(i, j, 0), dv(i, j, 0), du(i, j, 1), dv(i, j, 1), du(i, j, 2), dv(i, j, 2), Evv, Fuv, Guu);
    }
  return k;
}

// ---------------------------------------------------------------------------
// Graph surfaces y1 = q(y2, y3)

struct GraphNode {
  Vec2d ybar{};
  double q = 0.0;
  Vec2d dq{};
  Mat2d ddq{};
  Mat2d sigma{};                       // induced metric in (y2, y3)
  std::array<Mat2d, 2> dsigma{};       // dsigma[c][a][b] = d_c sigma_ab
  double grad_norm = 0.0;              // |grad f|_g at the root
  double root_residual = 0.0;          // |f(q, ybar)|
  Vec2d bracket{};

  Vec3d point() const { return {q, ybar[0], ybar[1]}; }
  /// Coordinate tangents d/dy2 and d/dy3 of the embedding.
  std::array<Vec3d, 2> tangents() const { return {Vec3d{dq[0], 1.0, 0.0}, Vec3d{dq[1], 0.0, 1.0}}; }
};

struct GraphSearch {
  /// Root search half-width along y1 is max(min_half_width, width_factor * |ybar|).
  double width_factor = 1.0;
  double min_half_width = 2.0;
  /// Points on the segment where d f / d y1 > 1/2 is checked.
  int monotonicity_checks = 33;
  double root_tolerance = 1e-10;
};

/// Root of y1 -> f(y1, ybar) with the implicit-function derivatives of q.
inline GraphNode solve_graph_node(const PotentialField& f, const MetricField& metric, const Vec2d& ybar,
                                  const GraphSearch& search = {}) {
  const double rho = std::hypot(ybar[0], ybar[1]);
  const double L = std::max(search.min_half_width, search.width_factor * rho);
  auto fd = [&](double y1) {
    const Vec3d x{y1, ybar[0], ybar[1]};
    metric.require_domain(x);
    const D1 v = f(seeded_point<D1>(x));
    return std::pair<double, double>{v.v, v.d[0]};
  };
  const std::string where = "node (" + std::to_string(ybar[0]) + ", " + std::to_string(ybar[1]) + ")";

  int sign_changes = 0;
  double prev = 0.0;
  for (int k = 0; k < search.monotonicity_checks; ++k) {
    const double y1 = -L + 2.0 * L * k / (search.monotonicity_checks - 1);
    const auto [v, dv] = fd(y1);
    if (k > 0 && ((prev < 0.0 && v >= 0.0) || (prev > 0.0 && v <= 0.0))) ++sign_changes;
    prev = v;
    if (!(dv > 0.5))
      throw MonotonicityError("df/dy1 = " + std::to_string(dv) + " <= 1/2 at y1 = " + std::to_string(y1) + " for " + where);
  }
  const double flo = fd(-L).first, fhi = fd(L).first;
  if (flo * fhi > 0.0) throw NoRootError("no sign change of f on [" + std::to_string(-L) + ", " + std::to_string(L) + "] at " + where);
  if (sign_changes > 1) throw MultiRootError(std::to_string(sign_changes) + " sign changes of f at " + where);

  boost::uintmax_t iters = 200;
  const double root = boost::math::tools::newton_raphson_iterate(
      [&](double y1) { return std::make_tuple(fd(y1).first, fd(y1).second); }, 0.0, -L, L,
      std::numeric_limits<double>::digits - 4, iters);
  GraphNode n;
  n.ybar = ybar;
  n.q = root;
  n.bracket = {-L, L};
  n.root_residual = std::abs(fd(root).first);
  if (!(root >= -L && root <= L) || !(n.root_residual < search.root_tolerance))
    throw NoRootError("root not certified at " + where + " (|f| = " + std::to_string(n.root_residual) + ")");

  const Vec3d x = n.point();
  const auto j = scalar_jet(f.function(), x);
  const double F1 = j.grad[0];
  for (int a = 0; a < 2; ++a) n.dq[a] = -j.grad[a + 1] / F1;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      n.ddq[a][b] = -(j.hess[a + 1][b + 1] + j.hess[0][a + 1] * n.dq[b] + j.hess[0][b + 1] * n.dq[a] +
                      j.hess[0][0] * n.dq[a] * n.dq[b]) /
                    F1;

  const Mat3<D1> g1 = metric(seeded_point<D1>(x));
  Mat3d g;
  Tensor3<double> dg;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      g[a][b] = g1[a][b].v;
      for (int c = 0; c < 3; ++c) dg[c][a][b] = g1[a][b].d[c];
    }
  MetricField::check_positive_definite(g, x);
  const auto t = n.tangents();
  const Vec3d e1 = detail::unit_axis(0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      n.sigma[a][b] = bilinear(g, t[a], t[b]);
      for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += t[c][k] * bilinear(dg[k], t[a], t[b]);
        s += n.ddq[a][c] * bilinear(g, e1, t[b]) + n.ddq[b][c] * bilinear(g, t[a], e1);
        n.dsigma[c][a][b] = s;
      }
    }
  n.grad_norm = detail::grad_norm(inverse(g), j.grad);
  return n;
}

/// Induced metric in polar coordinates (s = ln rho, theta) about `center`,
/// with first derivatives. Index 0 is s, index 1 is theta.
struct PolarMetric {
  Mat2d m{};
  std::array<Mat2d, 2> dm{};  // dm[w][u][v] = d_w m_uv
};

inline PolarMetric polar_metric(const GraphNode& n, const Vec2d& center) {
  const double dx = n.ybar[0] - center[0], dy = n.ybar[1] - center[1];
  // J[a][u] = d y_a / d u, u in (s, theta).
  const Mat2d J{{{dx, -dy}, {dy, dx}}};
  const std::array<Mat2d, 2> dJ{J, Mat2d{{{-dy, -dx}, {dx, -dy}}}};
  PolarMetric pm;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += J[a][u] * n.sigma[a][b] * J[b][v];
      pm.m[u][v] = s;
      for (int w = 0; w < 2; ++w) {
        double d = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double ds = 0.0;
            for (int c = 0; c < 2; ++c) ds += J[c][w] * n.dsigma[c][a][b];
            d += dJ[w][a][u] * n.sigma[a][b] * J[b][v] + J[a][u] * n.sigma[a][b] * dJ[w][b][v] + J[a][u] * J[b][v] * ds;
          }
        pm.dm[w][u][v] = d;
      }
    }
  return pm;
}

/// Geodesic curvature of the circle s = const (counter-clockwise, normal
/// pointing to the center) times its arclength density d ell / d theta.
inline std::pair<double, double> ring_curvature(const PolarMetric& pm) {
  const double E = pm.m[0][0], F = pm.m[0][1], G = pm.m[1][1];
  const double det = E * G - F * F;
  const double inv_ss = G / det, inv_st = -F / det;
  const double Fth = pm.dm[1][0][1], Gs = pm.dm[0][1][1], Gth = pm.dm[1][1][1];
  const double gamma_s_tt = inv_ss * (Fth - 0.5 * Gs) + inv_st * 0.5 * Gth;
  const double kappa = -std::sqrt(det) * gamma_s_tt / std::pow(G, 1.5);
  return {kappa, std::sqrt(G)};
}

/// Polar grid over the annulus C < |ybar - center| < R_max.
struct GraphGrid {
  double inner = 10.0;
  double outer = 200.0;
  int n_radial = 96;
  int n_angular = 64;
  Vec2d center{0.0, 0.0};

  double ds() const { return std::log(outer / inner) / (n_radial - 1); }
  double dtheta() const { return 2.0 * std::numbers::pi / n_angular; }
  double radius(int i) const { return inner * std::exp(i * ds()); }
  Vec2d node(int i, int j) const {
    const double r = radius(i), th = j * dtheta();
    return {center[0] + r * std::cos(th), center[1] + r * std::sin(th)};
  }
};

struct SurfaceGraph {
  PotentialField f;
  MetricField metric;
  GraphGrid grid;
  GraphSearch search;
  std::vector<std::vector<GraphNode>> nodes;  // [radial][angular]
  std::vector<std::vector<double>> K;         // intrinsic Gaussian curvature, NaN near the rims
  /// Per-ring max |h_ab| + rho |d h_ab| and max |q|, with fitted log-log slopes.
  std::vector<double> ring_radius, h_decay, q_size;
  double h_decay_exponent = 0.0;
  double q_growth_exponent = 0.0;
};

/// K at every graph node from the Brioschi formula in the (y2, y3) chart.
/// First derivatives of sigma are exact; second derivatives come from
/// fourth-order differences of those along the polar grid, converted to the
/// Cartesian chart. Rings within two nodes of either rim are left NaN.
inline std::vector<std::vector<double>> graph_gaussian_curvature(const std::vector<std::vector<GraphNode>>& nodes,
                                                                  const GraphGrid& grid) {
  const int nr = static_cast<int>(nodes.size());
  const int na = grid.n_angular;
  std::vector<std::vector<double>> K(nr, std::vector<double>(na, detail::nan()));
  const double hs = grid.ds(), ht = grid.dtheta();
  auto at = [&](int i, int j) -> const GraphNode& { return nodes[i][((j % na) + na) % na]; };
  for (int i = 2; i + 2 < nr; ++i)
    for (int j = 0; j < na; ++j) {
      const GraphNode& n = at(i, j);
      const double dx = n.ybar[0] - grid.center[0], dy = n.ybar[1] - grid.center[1];
      const double rho2 = dx * dx + dy * dy;
      // Inverse of J[a][u] = d y_a / d u with u = (s, theta).
      const Mat2d Jinv{{{dx / rho2, dy / rho2}, {-dy / rho2, dx / rho2}}};
      // dd[c][e][a][b] = d_e d_c sigma_ab.
      double dd[2][2][2][2];
      for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const double ds_ = detail::d1(at(i - 2, j).dsigma[c][a][b], at(i - 1, j).dsigma[c][a][b],
                                          at(i + 1, j).dsigma[c][a][b], at(i + 2, j).dsigma[c][a][b], hs);
            const double dt_ = detail::d1(at(i, j - 2).dsigma[c][a][b], at(i, j - 1).dsigma[c][a][b],
                                          at(i, j + 1).dsigma[c][a][b], at(i, j + 2).dsigma[c][a][b], ht);
            for (int e = 0; e < 2; ++e) dd[c][e][a][b] = Jinv[0][e] * ds_ + Jinv[1][e] * dt_;
          }
      const auto& sg = n.sigma;
      const auto& d = n.dsigma;
      const double Fuv = 0.5 * (dd[0][1][0][1] + dd[1][0][0][1]);
      K[i][j] = brioschi(sg[0][0], sg[0][1], sg[1][1], d[0][0][0], d[1][0][0], d[0][0][1], d[1][0][1], d[0][1][1],
                         d[1][1][1], dd[1][1][0][0], Fuv, dd[0][0][1][1]);
    }
  return K;
}

inline SurfaceGraph extract_zero_graph(const PotentialField& f, const MetricField& metric, const GraphGrid& grid,
                                       const GraphSearch& search = {}) {
  if (!(grid.inner > 0.0 && grid.outer > grid.inner)) throw PreconditionError("graph annulus needs 0 < C < R_max");
  if (grid.n_radial < 5 || grid.n_angular < 8) throw PreconditionError("graph grid is too coarse");
  SurfaceGraph sg{f, metric, grid, search, {}, {}, {}, {}, {}, 0.0, 0.0};
  sg.nodes.resize(grid.n_radial);
  for (int i = 0; i < grid.n_radial; ++i) {
    sg.nodes[i].reserve(grid.n_angular);
    double hmax = 0.0, qmax = 0.0;
    const double rho = grid.radius(i);
    for (int j = 0; j < grid.n_angular; ++j) {
      const GraphNode n = solve_graph_node(f, metric, grid.node(i, j), search);
      if (n.grad_norm < 1e-8)
        throw CriticalOnZeroSet("|grad f| < 1e-8 on the zero set at " + format_point(n.point()));
      double hd = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double dh = 0.0;
          for (int c = 0; c < 2; ++c) dh = std::max(dh, std::abs(n.dsigma[c][a][b]));
          hd = std::max(hd, std::abs(n.sigma[a][b] - (a == b ? 1.0 : 0.0)) + rho * dh);
        }
      hmax = std::max(hmax, hd);
      qmax = std::max(qmax, std::abs(n.q));
      sg.nodes[i].push_back(n);
    }
    sg.ring_radius.push_back(rho);
    sg.h_decay.push_back(hmax);
    sg.q_size.push_back(qmax);
  }
  sg.K = graph_gaussian_curvature(sg.nodes, grid);
  sg.h_decay_exponent = loglog_slope(sg.ring_radius, sg.h_decay);
  sg.q_growth_exponent = loglog_slope(sg.ring_radius, sg.q_size);
  return sg;
}

struct RingIntegral {
  double radius = 0.0;
  double kappa_integral = 0.0;
  /// max over the ring of |kappa R - 1|.
  double kappa_deviation = 0.0;
};

struct GaussBonnetResult {
  std::vector<RingIntegral> rings;
  double extrapolated = 0.0;
  /// Log-log slope of kappa_deviation against R (-inf when it is exactly zero).
  double kappa_exponent = 0.0;
};

/// Integral of geodesic curvature over the level circle |ybar - center| = R.
inline RingIntegral ring_integral(const SurfaceGraph& sg, double R, int n_theta = 256, double resolution_tol = 1e-9) {
  if (R < sg.grid.inner || R > sg.grid.outer)
    throw PreconditionError("radius " + std::to_string(R) + " lies outside the graph annulus");
  if (n_theta < 16 || n_theta % 2) throw PreconditionError("ring resolution must be an even count >= 16");
  const double dth = 2.0 * std::numbers::pi / n_theta;
  double full = 0.0, half = 0.0, dev = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = j * dth;
    const Vec2d yb{sg.grid.center[0] + R * std::cos(th), sg.grid.center[1] + R * std::sin(th)};
    const GraphNode n = solve_graph_node(sg.f, sg.metric, yb, sg.search);
    const auto [kappa, density] = ring_curvature(polar_metric(n, sg.grid.center));
    const double term = kappa * density;
    full += term * dth;
    if (j % 2 == 0) half += term * 2.0 * dth;
    dev = std::max(dev, std::abs(kappa * R - 1.0));
  }
  if (std::abs(full - half) > resolution_tol * (1.0 + std::abs(full)))
    throw ResolutionError("ring integral at R = " + std::to_string(R) + " changes by " + std::to_string(std::abs(full - half)) +
                          " between " + std::to_string(n_theta / 2) + " and " + std::to_string(n_theta) + " nodes");
  return {R, full, dev};
}

inline GaussBonnetResult gauss_bonnet_limit(const SurfaceGraph& sg, const std::vector<double>& radii, int n_theta = 256) {
  if (radii.empty()) throw PreconditionError("no radii requested");
  GaussBonnetResult res;
  std::vector<double> rs, ks, ds;
  for (double R : radii) {
    res.rings.push_back(ring_integral(sg, R, n_theta));
    rs.push_back(R);
    ks.push_back(res.rings.back().kappa_integral);
    ds.push_back(res.rings.back().kappa_deviation);
  }
  res.extrapolated = radii.size() >= 2 ? extrapolate_to_infinity(rs, ks, 2) : ks.front();
  res.kappa_exponent = radii.size() >= 2 ? loglog_slope(rs, ds) : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// Closed star-shaped components

struct BoundedMesh {
  Vec3d center{};
  /// Columns are the local x, y and polar axes.
  Mat3d axes = identity_matrix<double>();
  int n_lat = 0;
  int n_phi = 0;
  std::vector<double> theta;                  // latitude angles, excluding the poles
  std::vector<std::vector<double>> radius;    // [lat][phi]
  std::array<double, 2> pole_radius{};        // north, south
  std::vector<std::vector<std::array<Vec3d, 2>>> tangents;  // d/dtheta, d/dphi
  std::vector<std::vector<double>> grad_norm;
  std::vector<std::vector<double>> K;
  int vertices = 0;
  int edges = 0;
  int faces = 0;

  int euler_characteristic() const { return vertices - edges + faces; }
  Vec3d point(int i, int j) const {
    const double th = theta[i], ph = 2.0 * std::numbers::pi * j / n_phi;
    return center + radius[i][j] * matvec(axes, Vec3d{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
  }
};

struct RaySearch {
  double r_min = 0.1;
  double r_max = 10.0;
  double root_tolerance = 1e-10;
};

namespace detail {

inline double ray_root(const PotentialField& f, const MetricField& metric, const Vec3d& c, const Vec3d& n,
                       const RaySearch& rs) {
  auto F = [&](double r) {
    const Vec3d x = c + r * n;
    metric.require_domain(x);
    return f.value(Point3(x));
  };
  const double lo = F(rs.r_min), hi = F(rs.r_max);
  if (lo * hi > 0.0) throw NoRootError("no sign change of f along the ray " + format_point(n));
  boost::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 3);
  const auto br = boost::math::tools::toms748_solve(F, rs.r_min, rs.r_max, lo, hi, tol, iters);
  double r = 0.5 * (br.first + br.second);
  if (!(std::abs(F(r)) < rs.root_tolerance))
    throw NoRootError("ray root not certified along " + format_point(n) + " (|f| = " + std::to_string(std::abs(F(r))) + ")");
  return r;
}

}  // namespace detail

/// Meshes a closed component star-shaped about `center` by root-finding along
/// rays of a latitude-longitude grid (two pole vertices plus n_lat rings).
/// `axes` orients the grid; its third column is the polar axis.
inline BoundedMesh extract_bounded_component(const PotentialField& f, const MetricField& metric, const Vec3d& center,
                                             const RaySearch& rs, int n_lat = 96, int n_phi = 96,
                                             const Mat3d& axes = identity_matrix<double>()) {
  if (n_lat < 5 || n_phi < 8) throw PreconditionError("bounded mesh is too coarse");
  if (max_abs(matmul(transpose(axes), axes) - identity_matrix<double>()) > 1e-12)
    throw NotOrthogonalError("mesh axes are not orthonormal");
  BoundedMesh m;
  m.center = center;
  m.axes = axes;
  m.n_lat = n_lat;
  m.n_phi = n_phi;
  const double dth = std::numbers::pi / n_lat, dph = 2.0 * std::numbers::pi / n_phi;
  const Vec3d pole = matvec(axes, Vec3d{0, 0, 1});
  m.pole_radius = {detail::ray_root(f, metric, center, pole, rs), detail::ray_root(f, metric, center, -1.0 * pole, rs)};
  m.theta.resize(n_lat);
  m.radius.assign(n_lat, std::vector<double>(n_phi));
  m.tangents.assign(n_lat, std::vector<std::array<Vec3d, 2>>(n_phi));
  m.grad_norm.assign(n_lat, std::vector<double>(n_phi));
  std::vector<std::vector<Vec3d>> efg(n_lat, std::vector<Vec3d>(n_phi));
  for (int i = 0; i < n_lat; ++i) {
    const double th = (i + 0.5) * dth;
    m.theta[i] = th;
    for (int j = 0; j < n_phi; ++j) {
      const double ph = j * dph;
      const Vec3d n = matvec(axes, Vec3d{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      const Vec3d n_th = matvec(axes, Vec3d{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)});
      const Vec3d n_ph = matvec(axes, Vec3d{-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0});
      const double r = detail::ray_root(f, metric, center, n, rs);
      const Vec3d x = center + r * n;
      const Vec3d df = f.gradient(Point3(x));
      const Mat3d g = metric.checked_value(x);
      const double gn = detail::grad_norm(inverse(g), df);
      if (gn < 1e-8) throw CriticalOnZeroSet("|grad f| < 1e-8 on the zero set at " + format_point(x));
      const double Fr = dot(df, n);
      // X = c + r n; r_u = -(df . r n_u) / (df . n).
      const double r_th = -r * dot(df, n_th) / Fr, r_ph = -r * dot(df, n_ph) / Fr;
      const Vec3d t_th = r_th * n + r * n_th, t_ph = r_ph * n + r * n_ph;
      m.radius[i][j] = r;
      m.tangents[i][j] = {t_th, t_ph};
      m.grad_norm[i][j] = gn;
      efg[i][j] = {bilinear(g, t_th, t_th), bilinear(g, t_th, t_ph), bilinear(g, t_ph, t_ph)};
    }
  }
  m.K = brioschi_grid(efg, dth, dph);

  // Faces: pole triangle fans plus quads between rings; edges counted from faces.
  std::set<std::pair<int, int>> edge_set;
  auto vid = [&](int i, int j) { return 2 + i * n_phi + ((j % n_phi) + n_phi) % n_phi; };
  auto add = [&](int a, int b) { edge_set.insert({std::min(a, b), std::max(a, b)}); };
  int faces = 0;
  for (int j = 0; j < n_phi; ++j) {
    add(0, vid(0, j)), add(vid(0, j), vid(0, j + 1)), add(vid(0, j + 1), 0);
    add(1, vid(n_lat - 1, j)), add(vid(n_lat - 1, j), vid(n_lat - 1, j + 1)), add(vid(n_lat - 1, j + 1), 1);
    faces += 2;
    for (int i = 0; i + 1 < n_lat; ++i) {
      add(vid(i, j), vid(i, j + 1)), add(vid(i, j + 1), vid(i + 1, j + 1));
      add(vid(i + 1, j + 1), vid(i + 1, j)), add(vid(i + 1, j), vid(i, j));
      ++faces;
    }
  }
  m.vertices = 2 + n_lat * n_phi;
  m.edges = static_cast<int>(edge_set.size());
  m.faces = faces;
  return m;
}

// ---------------------------------------------------------------------------
// Components and the zero-set laws

enum class ComponentKind { UnboundedGraph, BoundedClosed };

/// One point of a component with its tangent pair and intrinsic curvature.
struct SurfaceSample {
  Vec3d x{};
  std::array<Vec3d, 2> tangents{};
  double K = detail::nan();
  double grad_norm = 0.0;
};

struct ZeroSetComponent {
  ComponentKind kind = ComponentKind::UnboundedGraph;
  std::optional<SurfaceGraph> graph;
  std::optional<BoundedMesh> mesh;
  std::vector<SurfaceSample> samples;
  std::vector<double> grad_norm_samples;
  double c = 0.0;         // mean |grad f|
  double c_spread = 0.0;  // stddev / mean
  int euler_char = 0;     // bounded components only
  int ends_met = 0;       // unbounded components: 1 in a single chart
};

namespace detail {

inline void finish_component(ZeroSetComponent& z) {
  double s = 0.0, s2 = 0.0;
  for (double v : z.grad_norm_samples) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(z.grad_norm_samples.size());
  z.c = s / n;
  z.c_spread = std::sqrt(std::max(0.0, s2 / n - z.c * z.c)) / z.c;
}

}  // namespace detail

inline ZeroSetComponent make_component(SurfaceGraph sg) {
  ZeroSetComponent z;
  z.kind = ComponentKind::UnboundedGraph;
  z.ends_met = 1;
  for (std::size_t i = 0; i < sg.nodes.size(); ++i)
    for (std::size_t j = 0; j < sg.nodes[i].size(); ++j) {
      const auto& n = sg.nodes[i][j];
      z.grad_norm_samples.push_back(n.grad_norm);
      z.samples.push_back({n.point(), n.tangents(), sg.K[i][j], n.grad_norm});
    }
  z.graph = std::move(sg);
  detail::finish_component(z);
  return z;
}

/// Intrinsic K on a latitude-longitude chart loses accuracy near the poles,
/// so samples with |cos theta| > cap_cos take K from `cover`, a second mesh of
/// the same component whose polar axis is perpendicular.
inline ZeroSetComponent make_component(BoundedMesh m, std::optional<BoundedMesh> cover = std::nullopt,
                                       double cap_cos = 0.8) {
  ZeroSetComponent z;
  z.kind = ComponentKind::BoundedClosed;
  z.euler_char = m.euler_characteristic();
  const Vec3d pole = matvec(m.axes, Vec3d{0, 0, 1});
  for (int i = 0; i < m.n_lat; ++i) {
    const bool in_cap = std::abs(std::cos(m.theta[i])) > cap_cos;
    for (int j = 0; j < m.n_phi; ++j) {
      z.grad_norm_samples.push_back(m.grad_norm[i][j]);
      z.samples.push_back({m.point(i, j), m.tangents[i][j], in_cap ? detail::nan() : m.K[i][j], m.grad_norm[i][j]});
    }
  }
  if (cover) {
    const BoundedMesh& c = *cover;
    for (int i = 0; i < c.n_lat; ++i) {
      if (std::abs(std::cos(c.theta[i])) > cap_cos) continue;
      for (int j = 0; j < c.n_phi; ++j) {
        const Vec3d x = c.point(i, j);
        const Vec3d d = x - m.center;
        if (std::abs(dot(d, pole)) / norm(d) <= cap_cos) continue;
        z.samples.push_back({x, c.tangents[i][j], c.K[i][j], c.grad_norm[i][j]});
      }
    }
  }
  z.mesh = std::move(m);
  detail::finish_component(z);
  return z;
}

/// Primary mesh about `center` plus a perpendicular cover for the polar caps.
inline ZeroSetComponent extract_closed_component(const PotentialField& f, const MetricField& metric, const Vec3d& center,
                                                 const RaySearch& rs, int n_lat = 96, int n_phi = 96) {
  BoundedMesh primary = extract_bounded_component(f, metric, center, rs, n_lat, n_phi);
  const Mat3d tilted{{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  BoundedMesh cover = extract_bounded_component(f, metric, center, rs, n_lat, n_phi, tilted);
  return make_component(std::move(primary), std::move(cover));
}

/// g-orthonormal adapted frame: e1, e2 tangent (diagonalising the tangential
/// Ricci block), e3 the unit normal along grad f.
struct AdaptedFrame {
  std::array<Vec3d, 3> e{};
  Mat3d ricci{};       // Ric(e_a, e_b)
  Mat2d hessian_t{};   // Hess f on (e1, e2)
};

inline AdaptedFrame adapted_frame(const CurvatureBundle& c, const ScalarJet2& fj, const std::array<Vec3d, 2>& t) {
  const Mat3d& g = c.metric;
  const Vec3d up = matvec(c.inverse_metric, fj.grad);
  const Vec3d nu = (1.0 / std::sqrt(bilinear(g, up, up))) * up;
  auto unit = [&](Vec3d v) { return (1.0 / std::sqrt(bilinear(g, v, v))) * v; };
  // Gram-Schmidt the tangents against nu (they are tangent already up to roundoff).
  Vec3d a = t[0] - bilinear(g, t[0], nu) * nu;
  a = unit(a);
  Vec3d b = t[1] - bilinear(g, t[1], nu) * nu - bilinear(g, t[1], a) * a;
  b = unit(b);
  const double raa = bilinear(c.ricci, a, a), rab = bilinear(c.ricci, a, b), rbb = bilinear(c.ricci, b, b);
  // Rotate (a, b) to diagonalise the tangential Ricci block, smaller eigenvalue first.
  const double ang = 0.5 * std::atan2(2.0 * rab, raa - rbb);
  Vec3d e1 = std::cos(ang) * a + std::sin(ang) * b;
  Vec3d e2 = -std::sin(ang) * a + std::cos(ang) * b;
  if (bilinear(c.ricci, e1, e1) > bilinear(c.ricci, e2, e2)) std::swap(e1, e2);
  AdaptedFrame fr;
  fr.e = {e1, e2, nu};
  const Mat3d h = covariant_hessian_from(fj, c.gamma);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) fr.ricci[i][j] = bilinear(c.ricci, fr.e[i], fr.e[j]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fr.hessian_t[i][j] = bilinear(h, fr.e[i], fr.e[j]);
  return fr;
}

struct LawSample {
  Vec3d x{};
  double K = detail::nan();
  double R11 = 0.0, R22 = 0.0, R33 = 0.0;
  double mixed_normal = 0.0;        // max |Ric(nu, e_alpha)|
  double second_fundamental = 0.0;  // |II| = |Hess f restricted| / |grad f|
  double K_gauss = 0.0;             // K from the Gauss equation
};

struct LawReport {
  std::vector<LawSample> samples;
  double grad_mean = 0.0;
  double grad_spread = 0.0;
  double max_second_fundamental = 0.0;
  double max_mixed_normal = 0.0;
  /// Max relative residuals over samples with intrinsic K available; the scale
  /// is max(|K|, |R33|) with a 1e-300 floor.
  double max_K_plus_R33 = 0.0;
  double max_K_minus_2R11 = 0.0;
  double max_R11_minus_R22 = 0.0;
  double max_intrinsic_vs_gauss = 0.0;
  int intrinsic_samples = 0;
};

inline LawReport zero_set_laws(const PotentialField& f, const MetricField& metric, const ZeroSetComponent& comp,
                               const StaticOptions& opts = {}) {
  LawReport rep;
  rep.grad_mean = comp.c;
  rep.grad_spread = comp.c_spread;
  for (const auto& s : comp.samples) {
    const Point3 p(s.x);
    require_static(f, metric, p, opts);
    const auto c = curvature_at(metric, p);
    const auto fj = f.jet(p);
    const auto fr = adapted_frame(c, fj, s.tangents);
    LawSample ls;
    ls.x = s.x;
    ls.K = s.K;
    ls.R11 = fr.ricci[0][0];
    ls.R22 = fr.ricci[1][1];
    ls.R33 = fr.ricci[2][2];
    ls.mixed_normal = std::max(std::abs(fr.ricci[2][0]), std::abs(fr.ricci[2][1]));
    const auto& h = fr.hessian_t;
    ls.second_fundamental = std::sqrt(h[0][0] * h[0][0] + 2 * h[0][1] * h[0][1] + h[1][1] * h[1][1]) / s.grad_norm;
    const double ii = (h[0][0] * h[1][1] - h[0][1] * h[0][1]) / (s.grad_norm * s.grad_norm);
    ls.K_gauss = sectional_curvature(c, fr.e[0], fr.e[1]) + ii;
    rep.max_second_fundamental = std::max(rep.max_second_fundamental, ls.second_fundamental);
    rep.max_mixed_normal = std::max(rep.max_mixed_normal, ls.mixed_normal);
    if (std::isfinite(s.K)) {
      const double scale = std::max({std::abs(s.K), std::abs(ls.R33), 1e-300});
      rep.max_K_plus_R33 = std::max(rep.max_K_plus_R33, std::abs(s.K + ls.R33) / scale);
      rep.max_K_minus_2R11 = std::max(rep.max_K_minus_2R11, std::abs(s.K - 2.0 * ls.R11) / scale);
      rep.max_R11_minus_R22 = std::max(rep.max_R11_minus_R22, std::abs(ls.R11 - ls.R22) / scale);
      rep.max_intrinsic_vs_gauss =
          std::max(rep.max_intrinsic_vs_gauss, std::abs(s.K - ls.K_gauss) / std::max({std::abs(s.K), std::abs(ls.K_gauss), 1e-300}));
      ++rep.intrinsic_samples;
    }
    rep.samples.push_back(ls);
  }
  return rep;
}

struct Kf3Report {
  std::vector<double> kf3;
  double mean = 0.0;
  /// (max - min) / max |K f^3|, zero when all samples vanish.
  double relative_spread = 0.0;
  /// Max over samples of |Hess_S f - K f sigma / 2| in an orthonormal tangent frame.
  double hessian_law_residual = 0.0;
  int samples = 0;
};

/// K f^3 along a zero-set component of f_zero, and the intrinsic Hessian law
/// for f_other on it.
inline Kf3Report kf3_law(const PotentialField& f_other, const PotentialField& f_zero, const MetricField& metric,
                         const ZeroSetComponent& comp, const StaticOptions& opts = {}) {
  Kf3Report rep;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mx = 0.0, sum = 0.0;
  for (const auto& s : comp.samples) {
    if (!std::isfinite(s.K)) continue;
    const Point3 p(s.x);
    require_static(f_other, metric, p, opts);
    require_static(f_zero, metric, p, opts);
    const auto c = curvature_at(metric, p);
    const auto zj = f_zero.jet(p);
    const auto oj = f_other.jet(p);
    const auto fr = adapted_frame(c, zj, s.tangents);
    const Mat3d ho = covariant_hessian_from(oj, c.gamma);
    const Mat3d hz = covariant_hessian_from(zj, c.gamma);
    const double nu_o = dot(fr.e[2], oj.grad);
    const double zn = s.grad_norm;
    double res = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        // Hess_S u = Hess u - Hess f_zero * nu(u) / |grad f_zero| on tangent vectors.
        const double hs = bilinear(ho, fr.e[a], fr.e[b]) - bilinear(hz, fr.e[a], fr.e[b]) * nu_o / zn;
        res = std::max(res, std::abs(hs - 0.5 * s.K * oj.value * (a == b ? 1.0 : 0.0)));
      }
    rep.hessian_law_residual = std::max(rep.hessian_law_residual, res);
    const double v = s.K * oj.value * oj.value * oj.value;
    rep.kf3.push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mx = std::max(mx, std::abs(v));
    sum += v;
  }
  rep.samples = static_cast<int>(rep.kf3.size());
  if (rep.samples == 0) throw PreconditionError("component has no samples with intrinsic curvature");
  rep.mean = sum / rep.samples;
  rep.relative_spread = mx > 0.0 ? (hi - lo) / mx : 0.0;
  return rep;
}

}  // namespace staticpot
