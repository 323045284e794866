#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "staticpot/global_identities.hpp"

using namespace staticpot;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(MassFit, SchwarzschildLapse) {
  for (double m : {2.0, 0.5}) {
    const auto fit = fit_mass_expansion(PotentialField::schwarzschild_N(m), MetricField::schwarzschild(m), {50.0, 400.0});
    EXPECT_NEAR(fit.limit_a, 1.0, 1e-5);
    EXPECT_NEAR(fit.mass_m, m, 0.01 * m);
    EXPECT_EQ(fit.radii.size(), 8u);
  }
}

TEST(MassFit, ScaledLapseKeepsMass) {
  const auto f = PotentialField::combine(3.0, PotentialField::schwarzschild_N(1.0), 0.0, PotentialField::affine(0, 0, 0, 0));
  const auto fit = fit_mass_expansion(f, MetricField::schwarzschild(1.0), {50.0, 400.0});
  EXPECT_NEAR(fit.limit_a, 3.0, 3e-6);
  EXPECT_NEAR(fit.mass_m, 1.0, 0.01);
}

TEST(MassFit, Rejections) {
  const auto g = MetricField::schwarzschild(1.0);
  EXPECT_THROW(fit_mass_expansion(PotentialField::affine(1, 0.2, 0, 0), g, {50.0, 400.0}), UnboundedPotentialError);
  EXPECT_THROW(fit_mass_expansion(PotentialField::schwarzschild_N(1.0), g, {2.0, 400.0}), PreconditionError);
  EXPECT_THROW(fit_mass_expansion(PotentialField::schwarzschild_N(1.0), g, {50.0, 40.0}), PreconditionError);
  MassFitOptions few;
  few.n_radii = 3;
  EXPECT_THROW(fit_mass_expansion(PotentialField::schwarzschild_N(1.0), g, {50.0, 400.0}, few), PreconditionError);
}

TEST(Quadrature, FlatShellVolume) {
  const auto g = MetricField::euclidean();
  const QuadratureSpec q;
  auto one = [](const Point3&, const CurvatureBundle&) { return 1.0; };
  EXPECT_NEAR(shell_integral(g, one, 1.0, 2.0, q), 4.0 * pi / 3.0 * 7.0, 1e-10);
  auto quartic = [](const Point3& p, const CurvatureBundle&) { return std::pow(p.r(), -4.0); };
  EXPECT_NEAR(shell_integral(g, quartic, 1.0, 0.0, q, RadialMap::ToInfinity), 4.0 * pi, 1e-10);
  EXPECT_NEAR(shell_integral(g, one, 0.0, 2.0, q, RadialMap::FromOrigin), 4.0 * pi / 3.0 * 8.0, 1e-10);
}

TEST(Quadrature, BudgetAndDomain) {
  QuadratureSpec q;
  q.budget = 100;
  auto one = [](const Point3&, const CurvatureBundle&) { return 1.0; };
  EXPECT_THROW(shell_integral(MetricField::euclidean(), one, 1.0, 2.0, q), QuadratureBudgetError);
  EXPECT_THROW(shell_integral(MetricField::euclidean(), one, 2.0, 1.0, QuadratureSpec{}), PreconditionError);
}

TEST(Quadrature, RadialFluxOfPositionField) {
  const auto g = MetricField::euclidean();
  auto x = [](const Point3& p, const CurvatureBundle&) { return p.vec(); };
  for (double r : {0.5, 3.0}) EXPECT_NEAR(sphere_flux(g, x, r, QuadratureSpec{}), 4.0 * pi * r * r * r, 1e-10 * r * r * r);
}

TEST(IntegralIdentity, DefectVanishesForStaticPair) {
  const auto rep = integral_identity_check(PotentialField::schwarzschild_N(1.0), MetricField::schwarzschild(1.0), {2.0, 40.0});
  EXPECT_LT(rep.relative_defect, 1e-8);
  EXPECT_GT(rep.bulk, 0.0);
}

TEST(IntegralIdentity, ExteriorHalfOfHorizonBookkeeping) {
  // Over r > m/2 the integral of N |Ric|^2 is half of 2 pi / m.
  const double m = 2.0;
  const auto g = MetricField::schwarzschild(m);
  const auto N = PotentialField::schwarzschild_N(m);
  const double v = shell_integral(
      g, [&](const Point3& p, const CurvatureBundle& c) { return N.value(p) * ricci_norm_squared(c); }, m / 2.0, 0.0,
      QuadratureSpec{}, RadialMap::ToInfinity);
  EXPECT_NEAR(v, pi / m, 1e-6);
}

TEST(IntegralIdentity, RejectsNonStatic) {
  EXPECT_THROW(integral_identity_check(PotentialField::custom("x1^2"), MetricField::euclidean(), {1.0, 2.0}),
               NotStaticError);
  EXPECT_THROW(integral_identity_check(PotentialField::schwarzschild_N(1.0), MetricField::schwarzschild(1.0), {3.0, 2.0}),
               PreconditionError);
}

TEST(ConformalDouble, SchwarzschildDoublesAreScalarFlat) {
  const auto g = MetricField::schwarzschild(1.0);
  const auto N = PotentialField::schwarzschild_N(1.0);
  for (int sign : {1, -1})
    for (const Point3& p : {Point3(2.0, 0.5, -1.0), Point3(0.7, 0.1, 0.2), Point3(30.0, -4.0, 8.0)})
      EXPECT_NEAR(conformal_double_scalar(N, g, sign, p), 0.0, 1e-9);
}

TEST(ConformalDouble, FlatOracle) {
  // R[u^4 delta] = -8 Laplacian(u) / u^5 with u = 1 + x1^2.
  const Point3 p(1.0, 0.3, -0.2);
  EXPECT_NEAR(conformal_double_scalar(PotentialField::custom("x1^2"), MetricField::euclidean(), 1, p), -0.5, 1e-10);
  EXPECT_THROW(conformal_double_scalar(PotentialField::affine(1, 0, 0, 0), MetricField::euclidean(), -1, p),
               DegenerateConformalError);
  EXPECT_THROW(conformal_double_scalar(PotentialField::affine(1, 0, 0, 0), MetricField::euclidean(), 2, p),
               PreconditionError);
}

TEST(Flow, LapseEscapesWithLimitOne) {
  const auto tr = flow_classify(PotentialField::schwarzschild_N(1.0), MetricField::schwarzschild(1.0), Point3(3.0, 0.5, 0.2));
  EXPECT_EQ(tr.classification, FlowClass::EscapeToEnd);
  EXPECT_NEAR(tr.limit_b, 1.0, 1e-3);
  EXPECT_FALSE(tr.b_unbounded);
  EXPECT_EQ(tr.monotonicity_violations, 0);
}

TEST(Flow, AffineIsUnbounded) {
  const auto tr = flow_classify(PotentialField::affine(0, 1, 0, 0), MetricField::euclidean(), Point3(1.0, 2.0, 3.0));
  EXPECT_EQ(tr.classification, FlowClass::EscapeToEnd);
  EXPECT_TRUE(tr.b_unbounded);
}

TEST(Flow, CriticalStart) {
  const auto tr = flow_classify(PotentialField::custom("(x1-1)^2 + x2^2 + x3^2"), MetricField::euclidean(), Point3(1.0, 0.0, 0.0));
  EXPECT_EQ(tr.classification, FlowClass::ConvergeCritical);
}

TEST(Flow, NegatedLapseFallsToBoundary) {
  const auto minus_N = PotentialField::combine(-1.0, PotentialField::schwarzschild_N(1.0), 0.0, PotentialField::affine(0, 0, 0, 0));
  const auto tr = flow_classify(minus_N, MetricField::schwarzschild(1.0), Point3(3.0, 0.5, 0.2));
  EXPECT_EQ(tr.classification, FlowClass::ExitBoundary);
  EXPECT_LT(tr.samples.back().x.r(), 0.6);
}

TEST(Anisotropy, CubicScalingTendsToThreeM) {
  GraphSearch search;
  for (double m : {2.0, -1.0}) {
    const auto res = anisotropy_limit(PotentialField::custom("x1 + ln(r)"), MetricField::schwarzschild(m),
                                      {50.0, 100.0, 200.0, 400.0, 800.0}, search);
    EXPECT_NEAR(res.limit3, 3.0 * m, 0.05 * std::abs(m)) << "m = " << m;
    EXPECT_LT(std::abs(res.limit2), 0.01 * std::abs(m));
  }
  EXPECT_THROW(anisotropy_limit(PotentialField::custom("x1"), MetricField::euclidean(), {5.0}), PreconditionError);
}
