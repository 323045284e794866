#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "staticpot/chart_geometry.hpp"

namespace testing_support {

using staticpot::Mat3d;
using staticpot::Point3;
using staticpot::Vec3d;

/// Points with uniform directions and radii uniform in [r_lo, r_hi].
inline std::vector<Point3> shell_points(unsigned seed, int n, double r_lo, double r_hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point3> out;
  for (int k = 0; k < n; ++k) {
    const double z = 2.0 * u(rng) - 1.0, ph = 2.0 * M_PI * u(rng);
    const double r = r_lo + (r_hi - r_lo) * u(rng);
    const double s = std::sqrt(1.0 - z * z);
    out.emplace_back(r * s * std::cos(ph), r * s * std::sin(ph), r * z);
  }
  return out;
}

/// Ricci of g = phi^4 delta in three dimensions from hand-written derivatives
/// of phi. With w = 2 ln phi:
///   Ric = -(Hess w - dw dw) - (Lap w + |dw|^2) delta.
inline Mat3d conformally_flat_ricci(double phi, const Vec3d& dphi, const Mat3d& ddphi) {
  Vec3d dw;
  Mat3d ddw;
  for (int i = 0; i < 3; ++i) dw[i] = 2.0 * dphi[i] / phi;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ddw[i][j] = 2.0 * ddphi[i][j] / phi - 2.0 * dphi[i] * dphi[j] / (phi * phi);
  const double lap = ddw[0][0] + ddw[1][1] + ddw[2][2];
  const double dw2 = dw[0] * dw[0] + dw[1] * dw[1] + dw[2] * dw[2];
  Mat3d ric;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ric[i][j] = -(ddw[i][j] - dw[i] * dw[j]) - (lap + dw2) * (i == j ? 1.0 : 0.0);
  return ric;
}

/// Schwarzschild Ricci via the conformal formula with phi = 1 + m / 2r.
inline Mat3d schwarzschild_ricci_oracle(double m, const Vec3d& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double phi = 1.0 + m / (2.0 * r);
  Vec3d d;
  Mat3d dd;
  for (int i = 0; i < 3; ++i) d[i] = -m * x[i] / (2.0 * r * r * r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      dd[i][j] = -0.5 * m * ((i == j ? 1.0 : 0.0) / (r * r * r) - 3.0 * x[i] * x[j] / (r * r * r * r * r));
  return conformally_flat_ricci(phi, d, dd);
}

inline double max_abs_diff(const Mat3d& a, const Mat3d& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

}  // namespace testing_support
