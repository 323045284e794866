#include <cmath>

#include <gtest/gtest.h>

#include "staticpot/pointwise_identities.hpp"
#include "staticpot/static_potentials.hpp"
#include "support.hpp"

using namespace staticpot;
using testing_support::max_abs_diff;
using testing_support::shell_points;

TEST(StaticResidual, AffineFunctionsOnFlatSpace) {
  const auto flat = MetricField::euclidean();
  const auto f = PotentialField::affine(1.5, -0.2, 3.0, 0.7);
  for (const auto& p : shell_points(1, 20, 0.1, 50.0)) {
    const auto r = static_residual(f, flat, p);
    EXPECT_EQ(r.combined_norm, 0.0);
    EXPECT_TRUE(is_static_at(f, flat, p));
  }
}

TEST(StaticResidual, SchwarzschildLapseSatisfiesHessianEquation) {
  // Hess N = N Ric with Ric from the independent conformal oracle.
  for (double m : {1.0, 2.0}) {
    const auto metric = MetricField::schwarzschild(m);
    const auto n = PotentialField::schwarzschild_N(m);
    for (const auto& p : shell_points(2, 20, m, 40.0)) {
      const Mat3d h = covariant_hessian(n, metric, p);
      const Mat3d ric = testing_support::schwarzschild_ricci_oracle(m, p.vec());
      EXPECT_LT(max_abs_diff(h, n.value(p) * ric), 1e-14);
      EXPECT_LT(static_residual(n, metric, p).combined_norm, 1e-13);
    }
  }
}

TEST(StaticResidual, QuadraticIsRejected) {
  const auto flat = MetricField::euclidean();
  const auto f = PotentialField::custom("x1^2");
  const Point3 p(0.3, 0.2, 0.1);
  const auto r = static_residual(f, flat, p);
  EXPECT_NEAR(r.laplacian_residual, 2.0, 1e-14);
  EXPECT_NEAR(r.tensor_residual[0][0], 2.0, 1e-14);
  EXPECT_THROW(require_static(f, flat, p), NotStaticError);
}

TEST(StaticResidual, LinearCombinationsStayStatic) {
  const auto metric = MetricField::schwarzschild(1.0);
  const auto n = PotentialField::schwarzschild_N(1.0);
  const auto f = PotentialField::combine(2.5, n, -0.5, n.scaled(3.0));
  for (const auto& p : shell_points(4, 10, 1.0, 20.0)) EXPECT_TRUE(is_static_at(f, metric, p));
  const auto flat = MetricField::euclidean();
  const auto g = PotentialField::combine(1.0, PotentialField::affine(1, 2, 3, 4), -2.0, PotentialField::affine(0, 1, 0, 1));
  ASSERT_TRUE(g.linear_part().has_value());
  EXPECT_DOUBLE_EQ((*g.linear_part())[0], 0.0);
  for (const auto& p : shell_points(5, 10, 1.0, 20.0)) EXPECT_TRUE(is_static_at(g, flat, p));
}

TEST(StaticResidual, RotationCommutesWithStaticity) {
  const auto metric = MetricField::schwarzschild(1.0);
  const auto n = PotentialField::schwarzschild_N(1.0);
  const Mat3d q = axis_rotation(1, 0.8);
  const auto rm = rotate_chart(metric, q);
  const auto rn = rotate_potential(n, q);
  for (const auto& p : shell_points(6, 10, 1.0, 20.0)) {
    const Point3 y(matvec(q, p.vec()));
    EXPECT_NEAR(rn.value(y), n.value(p), 1e-15);
    EXPECT_LT(static_residual(rn, rm, y).combined_norm, 1e-13);
  }
}

TEST(Bochner, VanishesForStaticPotentials) {
  const auto metric = MetricField::schwarzschild(2.0);
  const auto n = PotentialField::schwarzschild_N(2.0);
  for (const auto& p : shell_points(8, 20, 2.0, 40.0)) EXPECT_LT(std::abs(bochner_residual(n, metric, p)), 1e-14);
}

TEST(Bochner, ZeroPotentialAndNonStaticErrors) {
  const auto metric = MetricField::schwarzschild(2.0);
  const auto n = PotentialField::schwarzschild_N(2.0);
  EXPECT_THROW(bochner_residual(n, metric, Point3(1.0, 0.0, 0.0)), ZeroPotentialError);
  EXPECT_THROW(bochner_residual(PotentialField::custom("1 + x1^2"), MetricField::euclidean(), Point3(1, 0, 0)),
               NotStaticError);
}

TEST(LinearPart, AffineAndBoundedPotentials) {
  const std::vector<double> radii{20, 40, 80, 160};
  const auto flat = MetricField::euclidean();
  const auto fit = fit_linear_part(PotentialField::affine(1.0, 0.5, -2.0, 0.25), flat, radii);
  EXPECT_NEAR(fit.a[0], 0.5, 1e-12);
  EXPECT_NEAR(fit.a[1], -2.0, 1e-12);
  EXPECT_NEAR(fit.a[2], 0.25, 1e-12);
  const auto sch = fit_linear_part(PotentialField::schwarzschild_N(2.0), MetricField::schwarzschild(2.0), radii);
  EXPECT_LT(norm(sch.a), 1e-10);
  EXPECT_THROW(fit_linear_part(PotentialField::custom("x1*r"), flat, radii), NonConvergentError);
  EXPECT_THROW(fit_linear_part(PotentialField::custom("x1"), flat, {10, 20}), PreconditionError);
}

TEST(Eigenframe, ClassifiesKnownSpectra) {
  const Mat3d g = identity_matrix<double>();
  const auto a = eigenframe_from(Mat3d{{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}}, g);
  EXPECT_EQ(a.distinctness, Distinctness::AllDistinct);
  const auto b = eigenframe_from(Mat3d{{{3, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, g);
  EXPECT_EQ(b.distinctness, Distinctness::TwoEqual);
  EXPECT_EQ(b.simple_index, 2);
  EXPECT_NEAR(std::abs(b.frame[2][0]), 1.0, 1e-14);
  const auto c = eigenframe_from(identity_matrix<double>(), g);
  EXPECT_EQ(c.distinctness, Distinctness::AllEqual);
  // Generalised problem: Ric = 2 g with g = 4 delta gives eigenvalue 2 and unit g-norm frames.
  Mat3d g4{};
  Mat3d r8{};
  for (int i = 0; i < 3; ++i) {
    g4[i][i] = 4.0;
    r8[i][i] = 8.0;
  }
  const auto d = eigenframe_from(r8, g4);
  EXPECT_NEAR(d.eigenvalues[0], 2.0, 1e-14);
  EXPECT_NEAR(bilinear(g4, d.frame[1], d.frame[1]), 1.0, 1e-14);
}

TEST(Eigenframe, SchwarzschildIsRadiallySymmetric) {
  const auto metric = MetricField::schwarzschild(2.0);
  const auto scan = eigenvalue_gap_scan(metric, ShellRegion{3.0, 30.0, 3, 4, 6}.points());
  EXPECT_EQ(scan.two_equal, static_cast<int>(scan.rows.size()));
  EXPECT_LT(scan.max_radial_deviation, 1e-6);
  for (const auto& row : scan.rows) {
    // Eigenvalues in g: -2 m / (r^3 phi^6) once and m / (r^3 phi^6) twice.
    const double r = row.point.r(), phi = 1.0 + 1.0 / r;
    const double base = 2.0 / (r * r * r * std::pow(phi, 6));
    EXPECT_NEAR(row.eigenvalues[0], -2.0 * base, 1e-12);
    EXPECT_NEAR(row.eigenvalues[2], base, 1e-12);
  }
  EXPECT_THROW(eigenvalue_gap_scan(metric, {}), PreconditionError);
}

TEST(Tod, ResidualsVanishForSchwarzschild) {
  for (double m : {1.0, 2.0}) {
    const auto metric = MetricField::schwarzschild(m);
    const auto n = PotentialField::schwarzschild_N(m);
    for (const auto& p : shell_points(21, 20, m, 30.0))
      for (double r : tod_identity_residuals(n, metric, p)) EXPECT_LT(std::abs(r), 1e-14);
  }
}

TEST(Tod, ResidualsVanishInRotatedChart) {
  const Mat3d q = matmul(axis_rotation(0, 0.3), axis_rotation(1, 1.2));
  const auto metric = rotate_chart(MetricField::schwarzschild(1.0), q);
  const auto n = rotate_potential(PotentialField::schwarzschild_N(1.0), q);
  for (const auto& p : shell_points(22, 10, 1.0, 20.0))
    for (double r : tod_identity_residuals(n, metric, p)) EXPECT_LT(std::abs(r), 1e-14);
}

TEST(Tod, RejectsNonStaticPotential) {
  EXPECT_THROW(tod_identity_residuals(PotentialField::custom("x1^2"), MetricField::schwarzschild(1.0), Point3(3, 1, 0)),
               NotStaticError);
}

TEST(Quotient, RatioOfAffinePotentials) {
  const auto flat = MetricField::euclidean();
  const auto f = PotentialField::affine(0.3, 1.0, -2.0, 0.5);
  const auto n = PotentialField::affine(10.0, 0.2, 0.1, -0.3);
  for (const auto& p : shell_points(23, 10, 0.5, 5.0)) EXPECT_LT(max_abs(quotient_residual(f, n, flat, p)), 1e-13);
  EXPECT_THROW(quotient_residual(f, PotentialField::affine(-1.0, 0, 0, 0), flat, Point3(1, 0, 0)), ZeroPotentialError);
}
