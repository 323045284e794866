#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "staticpot/core/dual.hpp"
#include "staticpot/core/fit.hpp"
#include "staticpot/core/tensor.hpp"
#include "staticpot/expression.hpp"
#include "staticpot/quadrature.hpp"

using namespace staticpot;

TEST(Dual, FirstDerivativesMatchCalculus) {
  const Vec3d p{0.7, -1.3, 2.1};
  const auto x = seeded_point<D1>(p);
  const D1 f = sin(x[0]) * exp(x[1]) + sqrt(x[2]) / x[0];
  EXPECT_NEAR(f.v, std::sin(0.7) * std::exp(-1.3) + std::sqrt(2.1) / 0.7, 1e-15);
  EXPECT_NEAR(f.d[0], std::cos(0.7) * std::exp(-1.3) - std::sqrt(2.1) / (0.7 * 0.7), 1e-14);
  EXPECT_NEAR(f.d[1], std::sin(0.7) * std::exp(-1.3), 1e-15);
  EXPECT_NEAR(f.d[2], 0.5 / (std::sqrt(2.1) * 0.7), 1e-15);
}

TEST(Dual, NestedSecondAndThirdDerivatives) {
  const Vec3d p{1.1, 0.4, -0.9};
  const auto x = seeded_point<D3>(p);
  // f = x^3 y + log(z^2): f_xx = 6xy, f_xy = 3x^2, f_xxy = 6x, f_zz = -2/z^2.
  const D3 f = x[0] * x[0] * x[0] * x[1] + log(x[2] * x[2]);
  EXPECT_NEAR(f.d[0].d[0].v, 6 * 1.1 * 0.4, 1e-13);
  EXPECT_NEAR(f.d[0].d[1].v, 3 * 1.1 * 1.1, 1e-13);
  EXPECT_NEAR(f.d[0].d[0].d[1], 6 * 1.1, 1e-13);
  EXPECT_NEAR(f.d[2].d[2].v, -2.0 / (0.9 * 0.9), 1e-13);
  EXPECT_DOUBLE_EQ(f.d[0].d[1].v, f.d[1].d[0].v);
}

TEST(Dual, IntegerPowerHandlesNegativeBase) {
  const auto x = seeded_point<D1>(Vec3d{-2.0, 0.0, 0.0});
  const D1 y = ipow(x[0], 3);
  EXPECT_DOUBLE_EQ(y.v, -8.0);
  EXPECT_DOUBLE_EQ(y.d[0], 12.0);
}

TEST(Fit, RecoversInversePowerCoefficients) {
  std::vector<double> x, y;
  for (double r = 50; r <= 400; r *= 1.3) {
    x.push_back(r);
    y.push_back(0.9 - 1.8 / r + 3.0 / (r * r));
  }
  const auto fit = fit_inverse_powers(x, y, 3);
  EXPECT_NEAR(fit.coefficients[0], 0.9, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], -1.8, 1e-9);
  EXPECT_NEAR(fit.coefficients[2], 3.0, 1e-6);
}

TEST(Fit, TooFewSamplesIsIllConditioned) {
  const std::vector<double> x{1.0, 2.0}, y{1.0, 2.0};
  EXPECT_THROW(fit_inverse_powers(x, y, 3), IllConditionedFitError);
}

TEST(Fit, LogLogSlopeOfPowerLaw) {
  std::vector<double> x, y;
  for (double r = 1; r < 100; r *= 2) {
    x.push_back(r);
    y.push_back(5.0 * std::pow(r, -2.5));
  }
  EXPECT_NEAR(loglog_slope(x, y), -2.5, 1e-12);
}

TEST(Expression, EvaluatesLikeDirectCode) {
  const auto e = Expression::parse("x1 + ln(r) - 2*x2^2/(1 + sqrt(x3^2))");
  const Vec3d p{0.3, -1.2, 2.5};
  const double r = std::sqrt(0.09 + 1.44 + 6.25);
  EXPECT_NEAR(e(p), 0.3 + std::log(r) - 2 * 1.44 / (1 + 2.5), 1e-14);
}

TEST(Expression, PrecedenceAndUnaryMinus) {
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(Vec3d{0, 0, 0}), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1 - 2 - 3")(Vec3d{0, 0, 0}), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("8 / 4 / 2")(Vec3d{0, 0, 0}), 1.0);
}

TEST(Expression, DerivativesThroughDuals) {
  const auto e = Expression::parse("x1^3 * x2^0.5");
  const D1 v = e(seeded_point<D1>(Vec3d{2.0, 4.0, 0.0}));
  EXPECT_NEAR(v.d[0], 3 * 4.0 * 2.0, 1e-13);
  EXPECT_NEAR(v.d[1], 8.0 * 0.5 / 2.0, 1e-13);
}

TEST(Expression, RejectsMalformedInput) {
  EXPECT_THROW(Expression::parse("x4"), ParseError);
  EXPECT_THROW(Expression::parse("(x1 + 1"), ParseError);
  EXPECT_THROW(Expression::parse("1 +"), ParseError);
  EXPECT_THROW(Expression::parse("foo(x1)"), ParseError);
}

TEST(Quadrature, GaussLegendreIsExactToDegree2nMinus1) {
  const GaussLegendre gl(6);
  for (int deg = 0; deg <= 11; ++deg) {
    double s = 0.0;
    for (auto [x, w] : gl.on(-1.0, 2.0)) s += w * std::pow(x, deg);
    const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "degree " << deg;
  }
}

TEST(Quadrature, SphereRuleMoments) {
  const SphereRule rule(16, 32);
  EXPECT_NEAR(rule.integrate([](const Vec3d&) { return 1.0; }), 4 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(rule.integrate([](const Vec3d& n) { return n[0] * n[0]; }), 4 * std::numbers::pi / 3, 1e-13);
  EXPECT_NEAR(rule.integrate([](const Vec3d& n) { return n[0] * n[1] * n[2]; }), 0.0, 1e-14);
  EXPECT_NEAR(rule.integrate([](const Vec3d& n) { return std::pow(n[2], 4); }), 4 * std::numbers::pi / 5, 1e-13);
}
