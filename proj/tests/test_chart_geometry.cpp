#include <cmath>

#include <gtest/gtest.h>

#include "staticpot/chart_geometry.hpp"
#include "support.hpp"

using namespace staticpot;
using testing_support::max_abs_diff;
using testing_support::shell_points;

namespace {

/// Round 3-sphere of radius 1 in stereographic coordinates: Ric = 2 g, R = 6.
MetricField stereographic_sphere() {
  return MetricField::generic(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        const S c = 4.0 / ((1.0 + dot(x, x)) * (1.0 + dot(x, x)));
        Mat3<S> g = zero_matrix<S>();
        for (int i = 0; i < 3; ++i) g[i][i] = c;
        return g;
      },
      "sphere");
}

/// Poincare ball: Ric = -2 g, R = -6.
MetricField poincare_ball() {
  return MetricField::generic(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        const S c = 4.0 / ((1.0 - dot(x, x)) * (1.0 - dot(x, x)));
        Mat3<S> g = zero_matrix<S>();
        for (int i = 0; i < 3; ++i) g[i][i] = c;
        return g;
      },
      "hyperbolic", [](const Vec3d& p) { return norm(p) < 1.0; });
}

MetricField sample_perturbed() {
  return MetricField::perturbed_as(1.0, {{1, 2, 0.5, 1, 2}, {1, 1, 0.3, 0, 0}, {0, 0, 0.2, 1, 1}}, 1.0);
}

}  // namespace

TEST(Curvature, ConstantCurvatureSpaceForms) {
  const auto sphere = stereographic_sphere();
  const auto ball = poincare_ball();
  for (const auto& p : shell_points(11, 25, 0.05, 0.9)) {
    const auto cs = curvature_at(sphere, p);
    EXPECT_NEAR(cs.scalar, 6.0, 1e-10);
    EXPECT_LT(max_abs_diff(cs.ricci, 2.0 * cs.metric), 1e-10);
    const auto ch = curvature_at(ball, p);
    EXPECT_NEAR(ch.scalar, -6.0, 1e-8);
    EXPECT_NEAR(sectional_curvature(ch, {1, 0, 0}, {0.3, 1, 0.2}), -1.0, 1e-9);
  }
}

TEST(Curvature, SchwarzschildMatchesConformalOracle) {
  for (double m : {1.0, 2.0, -1.0}) {
    const auto metric = MetricField::schwarzschild(m);
    for (const auto& p : shell_points(7, 20, std::abs(m) + 0.5, 30.0)) {
      const auto c = curvature_at(metric, p);
      EXPECT_LT(max_abs_diff(c.ricci, testing_support::schwarzschild_ricci_oracle(m, p.vec())), 1e-13);
      EXPECT_LT(std::abs(c.scalar), 1e-12);
    }
  }
}

TEST(Curvature, BackendsAgreeOnPerturbedMetric) {
  const auto metric = sample_perturbed();
  for (const auto& p : shell_points(3, 30, 2.0, 40.0)) {
    const auto a = curvature_at(metric, p);
    const auto b = curvature_at(metric, p, {Backend::FiniteDifference});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) EXPECT_NEAR(a.riemann[i][j][k][l], b.riemann[i][j][k][l], 1e-6);
  }
}

TEST(Curvature, RiemannSymmetriesAndBianchi) {
  const auto metric = sample_perturbed();
  for (const auto& p : shell_points(5, 10, 2.0, 20.0)) {
    const auto c = curvature_at(metric, p);
    // Lower the first index: R_dabc = g_de R^e_abc.
    Riemann low{};
    for (int d = 0; d < 3; ++d)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int cc = 0; cc < 3; ++cc)
            for (int e = 0; e < 3; ++e) low[d][a][b][cc] += c.metric[d][e] * c.riemann[e][a][b][cc];
    for (int d = 0; d < 3; ++d)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int cc = 0; cc < 3; ++cc) {
            EXPECT_NEAR(low[d][a][b][cc], -low[d][a][cc][b], 1e-15);
            EXPECT_NEAR(low[d][a][b][cc], -low[a][d][b][cc], 1e-15);
            EXPECT_NEAR(low[d][a][b][cc], low[b][cc][d][a], 1e-15);
            EXPECT_NEAR(low[d][a][b][cc] + low[d][b][cc][a] + low[d][cc][a][b], 0.0, 1e-15);
          }
  }
}

TEST(Curvature, ContractedBianchiIdentity) {
  // g^ac R_ab;c = (1/2) d_b R.
  const auto metric = sample_perturbed();
  for (const auto& p : shell_points(9, 10, 2.0, 20.0)) {
    const auto rj = ricci_jet_at(metric, p);
    const auto& gi = rj.curvature.inverse_metric;
    for (int b = 0; b < 3; ++b) {
      double div = 0.0, trace_der = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          div += gi[a][c] * rj.covariant[a][b][c];
          trace_der += gi[a][c] * rj.covariant[a][c][b];
        }
      // g^ac R_ac;b = d_b R by metric compatibility.
      EXPECT_NEAR(div, 0.5 * trace_der, 1e-9 * std::abs(trace_der) + 1e-18);
    }
  }
}

TEST(Curvature, ReconstructionFromRicciInThreeDimensions) {
  const auto metric = sample_perturbed();
  for (const auto& p : shell_points(13, 15, 2.0, 30.0)) {
    const auto c = curvature_at(metric, p);
    const auto rec = reconstruct_riemann_from_ricci(c.ricci, c.scalar, c.metric);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) EXPECT_NEAR(rec[i][j][k][l], c.riemann[i][j][k][l], 1e-14);
  }
}

TEST(Curvature, ScalarCurvatureInvariantUnderRotation) {
  const auto metric = sample_perturbed();
  const Mat3d q = matmul(axis_rotation(0, 0.4), axis_rotation(2, -1.1));
  const auto rotated = rotate_chart(metric, q);
  for (const auto& p : shell_points(17, 10, 3.0, 20.0)) {
    const auto a = curvature_at(metric, p);
    const auto b = curvature_at(rotated, Point3(matvec(q, p.vec())));
    EXPECT_NEAR(a.scalar, b.scalar, 1e-14);
    EXPECT_NEAR(ricci_norm_squared(a), ricci_norm_squared(b), 1e-14);
  }
}

TEST(Curvature, AlignToFirstAxisIsOrthogonal) {
  const Vec3d a{0.3, -2.0, 0.7};
  const Mat3d q = align_to_first_axis(a);
  EXPECT_LT(max_abs(matmul(transpose(q), q) - identity_matrix<double>()), 1e-14);
  const Vec3d e = matvec(q, (1.0 / norm(a)) * a);
  EXPECT_NEAR(e[0], 1.0, 1e-14);
  EXPECT_NEAR(e[1], 0.0, 1e-14);
}

TEST(ChartErrors, DomainAndDegeneracy) {
  const auto sch = MetricField::schwarzschild(2.0);
  EXPECT_THROW(curvature_at(sch, Point3(0.5, 0.0, 0.0)), DomainError);
  EXPECT_NO_THROW(curvature_at(MetricField::schwarzschild(2.0, true), Point3(0.5, 0.0, 0.0)));
  const auto bad = MetricField::generic(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat3<S> g = identity_matrix<S>();
        g[2][2] = S(-1.0);
        return g;
      },
      "lorentzian");
  EXPECT_THROW(curvature_at(bad, Point3(1, 1, 1)), SingularMetricError);
  Mat3d skew = identity_matrix<double>();
  skew[0][1] = 0.1;
  EXPECT_THROW(rotate_chart(sch, skew), NotOrthogonalError);
}

TEST(ChartErrors, DecayExponentRange) {
  MetricSpec s;
  s.family = MetricFamily::SchwarzschildIsotropic;
  s.mass = 1.0;
  s.tau = 0.5;
  EXPECT_THROW(make_metric(s), ConfigError);
  s.tau = 1.0;
  EXPECT_NO_THROW(make_metric(s));
}
