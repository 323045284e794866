#include <gtest/gtest.h>

#include <cmath>

#include "staticpot/geodesic_growth.hpp"

using namespace staticpot;

namespace {

std::vector<double> geometric_times(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 * std::pow(t1 / t0, double(k) / (n - 1));
  t.back() = t1;
  return t;
}

}  // namespace

TEST(GrowthAlpha, RootOfCharacteristicEquation) {
  EXPECT_NEAR(growth_alpha(0.5), 1.3660254037844386, 1e-15);
  for (double eps : {1e-6, 0.1, 0.5, 2.0, 10.0}) {
    const double a = growth_alpha(eps);
    EXPECT_GT(a, 1.0);
    EXPECT_NEAR(a * (a - 1.0), eps, 1e-13 * std::max(1.0, eps));
  }
  EXPECT_DOUBLE_EQ(growth_alpha(0.0), 1.0);
}

TEST(GrowthBound, InitialDataStrictlyDominated) {
  const auto b = make_growth_bound(0.5, 3.0, 2.0);
  EXPECT_GT(b.w(2.0), 3.0);
  EXPECT_GT(b.w_prime(2.0), 3.0);
  EXPECT_NEAR(b.w_second(7.0), b.epsilon / 49.0 * b.w(7.0), 1e-12 * b.w(7.0));
  EXPECT_THROW(make_growth_bound(0.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(make_growth_bound(0.5, 1.0, -1.0), PreconditionError);
}

TEST(Transport, ZeroForcingIsLinear) {
  const auto s = transport_scalar([](double) { return 0.0; }, 2.0, -0.5, geometric_times(1.0, 100.0, 50));
  for (const auto& x : s) {
    EXPECT_NEAR(x.f, 2.0 - 0.5 * (x.t - 1.0), 1e-10);
    EXPECT_NEAR(x.f_deriv, -0.5, 1e-12);
  }
}

TEST(Transport, ExtremalPowerLaw) {
  const double eps = 0.5, a = growth_alpha(eps);
  const auto s =
      transport_scalar([eps](double t) { return eps / (t * t); }, 1.0, a, geometric_times(1.0, 1e4, 200));
  for (const auto& x : s) EXPECT_NEAR(x.f / std::pow(x.t, a), 1.0, 1e-9);
}

TEST(Transport, RejectsBadSampleTimes) {
  auto h = [](double) { return 0.0; };
  EXPECT_THROW(transport_scalar(h, 1.0, 0.0, {1.0}), PreconditionError);
  EXPECT_THROW(transport_scalar(h, 1.0, 0.0, {1.0, 3.0, 2.0}), PreconditionError);
}

TEST(GrowthCheck, HoldsUnderHypotheses) {
  const double eps = 0.5;
  const auto b = make_growth_bound(eps, 1.0, 1.0);
  for (double c : {-1.0, 1.0}) {
    auto h = [eps, c](double t) { return c * eps / (t * t) * std::cos(std::log(t)); };
    const auto s = transport_scalar(h, 0.99, -0.99, geometric_times(1.0, 1e4, 300));
    const auto v = growth_bound_check(s, b);
    EXPECT_TRUE(v.holds) << "forcing sign " << c;
    EXPECT_GT(v.min_margin, 0.0);
  }
}

TEST(GrowthCheck, DetectsFasterGrowth) {
  const auto b = make_growth_bound(0.5, 1.0, 1.0);
  std::vector<GrowthSample> s;
  for (double t : geometric_times(1.0, 1e3, 40)) s.push_back({t, 0.5 * t * t, t, 0.0});
  const auto v = growth_bound_check(s, b);
  EXPECT_FALSE(v.holds);
  EXPECT_GT(v.violations, 0);
  EXPECT_LT(v.min_margin, 0.0);
}

TEST(GrowthCheck, HypothesisFailures) {
  const auto b = make_growth_bound(0.5, 1.0, 1.0);
  std::vector<GrowthSample> big_h{{1.0, 0.5, 0.5, 0.0}, {2.0, 0.5, 0.5, 1.0}};
  EXPECT_THROW(growth_bound_check(big_h, b), PreconditionError);
  std::vector<GrowthSample> big_f{{1.0, 5.0, 0.0, 0.0}, {2.0, 5.0, 0.0, 0.0}};
  EXPECT_THROW(growth_bound_check(big_f, b), PreconditionError);
  std::vector<GrowthSample> late{{1.5, 0.1, 0.0, 0.0}};
  EXPECT_THROW(growth_bound_check(late, b), PreconditionError);
  EXPECT_THROW(growth_bound_check({}, b), PreconditionError);
}

TEST(Geodesic, StraightLinesInFlatSpace) {
  const auto g = MetricField::euclidean();
  GeodesicState s0;
  s0.position = Point3(1.0, 0.0, 0.0);
  s0.velocity = {0.0, 0.6, 0.8};
  s0.f_val = 1.0;
  s0.f_deriv = 0.25;
  const auto tr = integrate_geodesic(g, s0, 10.0);
  const auto& e = tr.states.back();
  EXPECT_DOUBLE_EQ(e.t, 10.0);
  EXPECT_NEAR(e.position.x1, 1.0, 1e-10);
  EXPECT_NEAR(e.position.x2, 6.0, 1e-9);
  EXPECT_NEAR(e.position.x3, 8.0, 1e-9);
  EXPECT_NEAR(e.f_val, 3.5, 1e-9);
  EXPECT_LT(tr.max_speed_drift, 1e-12);
}

TEST(Geodesic, SchwarzschildSpeedPreservedAndMethodsAgree) {
  const auto g = MetricField::schwarzschild(1.0);
  const double r0 = 10.0, phi2 = std::pow(1.0 + 0.5 / r0, 2);
  GeodesicState s0;
  s0.position = Point3(r0, 0.0, 0.0);
  s0.velocity = {0.3 / phi2, std::sqrt(1.0 - 0.09) / phi2, 0.0};
  s0.f_val = 1.0;
  const auto a = integrate_geodesic(g, s0, 50.0);
  EXPECT_LT(a.max_speed_drift, 1e-7);
  StepControl rk4;
  rk4.method = StepMethod::FixedRK4;
  rk4.fixed_step = 0.02;
  const auto b = integrate_geodesic(g, s0, 50.0, rk4);
  const auto &ea = a.states.back(), &eb = b.states.back();
  EXPECT_NEAR(ea.position.x1, eb.position.x1, 1e-6);
  EXPECT_NEAR(ea.position.x2, eb.position.x2, 1e-6);
  EXPECT_NEAR(ea.f_val, eb.f_val, 1e-6);

  const auto t = transport_potential(g, 0.0, 1.0, a);
  EXPECT_NEAR(t.states.back().position.x2, ea.position.x2, 1e-6);
  EXPECT_GT(t.states.back().f_val, 0.0);
}

TEST(Geodesic, InwardRayLeavesExteriorChart) {
  const auto g = MetricField::schwarzschild(1.0);
  const double r0 = 5.0, phi2 = std::pow(1.0 + 0.5 / r0, 2);
  GeodesicState s0;
  s0.position = Point3(r0, 0.0, 0.0);
  s0.velocity = {-1.0 / phi2, 0.0, 0.0};
  EXPECT_THROW(integrate_geodesic(g, s0, 50.0), DomainExitError);
}

TEST(Geodesic, Preconditions) {
  const auto g = MetricField::euclidean();
  GeodesicState s0;
  s0.position = Point3(1.0, 0.0, 0.0);
  s0.velocity = {2.0, 0.0, 0.0};
  EXPECT_THROW(integrate_geodesic(g, s0, 1.0), PreconditionError);
  s0.velocity = {1.0, 0.0, 0.0};
  EXPECT_THROW(integrate_geodesic(g, s0, 0.0), PreconditionError);
  Trajectory empty;
  EXPECT_THROW(transport_potential(g, 1.0, 0.0, empty), PreconditionError);
}
