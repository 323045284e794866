#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "staticpot/chart_geometry.hpp"
#include "staticpot/core/errors.hpp"

namespace staticpot {

struct GeodesicState {
  Point3 position;
  Vec3d velocity{};
  double t = 0.0;
  double f_val = 0.0;
  double f_deriv = 0.0;
  double h_val = 0.0;  // Ric(velocity, velocity)
};

enum class StepMethod { AdaptiveDopri5, FixedRK4 };

struct StepControl {
  StepMethod method = StepMethod::AdaptiveDopri5;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double initial_step = 1e-2;
  /// Step size for FixedRK4.
  double fixed_step = 0.05;
  double min_step = 1e-12;
  long max_steps = 2'000'000;
};

struct Trajectory {
  std::vector<GeodesicState> states;
  double max_speed_drift = 0.0;
};

namespace detail {

using GeoState = std::array<double, 8>;  // x(3), v(3), f, f'

struct GeodesicSystem {
  const MetricField* metric;

  /// Fills dxdt; returns Ric(v, v) at x. Throws DomainError outside the chart.
  double eval(const GeoState& s, GeoState& dxdt) const {
    const Point3 p(s[0], s[1], s[2]);
    const auto c = curvature_at(*metric, p);
    const Vec3d v{s[3], s[4], s[5]};
    for (int k = 0; k < 3; ++k) {
      dxdt[k] = v[k];
      double a = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a += c.gamma[k][i][j] * v[i] * v[j];
      dxdt[3 + k] = -a;
    }
    const double h = bilinear(c.ricci, v, v);
    dxdt[6] = s[7];
    dxdt[7] = h * s[6];
    return h;
  }

  void operator()(const GeoState& s, GeoState& dxdt, double /*t*/) const { eval(s, dxdt); }
};

inline GeodesicState make_state(const MetricField& metric, const GeoState& s, double t) {
  GeodesicState g;
  g.position = Point3(s[0], s[1], s[2]);
  g.velocity = {s[3], s[4], s[5]};
  g.t = t;
  g.f_val = s[6];
  g.f_deriv = s[7];
  GeoState d{};
  g.h_val = GeodesicSystem{&metric}.eval(s, d);
  return g;
}

}  // namespace detail

/// g(v, v) at the state's position.
inline double speed_squared(const MetricField& metric, const GeodesicState& s) {
  return bilinear(metric.checked_value(s.position.vec()), s.velocity, s.velocity);
}

/// Integrates the geodesic together with f'' = Ric(v, v) f from start.t to t_end.
inline Trajectory integrate_geodesic(const MetricField& metric, const GeodesicState& start, double t_end,
                                     const StepControl& ctl = {}) {
  namespace ode = boost::numeric::odeint;
  using detail::GeoState;
  if (std::abs(speed_squared(metric, start) - 1.0) > 1e-8)
    throw PreconditionError("geodesic start velocity is not unit speed");
  if (!(t_end > start.t)) throw PreconditionError("t_end must exceed the start parameter");

  const detail::GeodesicSystem sys{&metric};
  GeoState s{start.position.x1, start.position.x2, start.position.x3, start.velocity[0], start.velocity[1],
             start.velocity[2], start.f_val, start.f_deriv};
  double t = start.t;
  Trajectory traj;
  traj.states.push_back(detail::make_state(metric, s, t));

  auto record = [&](const GeoState& st, double tt) {
    GeodesicState g = detail::make_state(metric, st, tt);
    traj.max_speed_drift = std::max(traj.max_speed_drift, std::abs(speed_squared(metric, g) - 1.0));
    traj.states.push_back(g);
  };
  auto inside = [&](const GeoState& st) { return metric.in_domain({st[0], st[1], st[2]}); };

  if (ctl.method == StepMethod::FixedRK4) {
    ode::runge_kutta4<GeoState> stepper;
    long n = static_cast<long>(std::ceil((t_end - t) / ctl.fixed_step - 1e-9));
    const double dt = (t_end - t) / n;
    for (long k = 0; k < n; ++k) {
      GeoState next = s;
      try {
        stepper.do_step(sys, next, t, dt);
      } catch (const DomainError&) {
        throw DomainExitError("geodesic left the chart near t = " + std::to_string(t), {s[0], s[1], s[2]});
      }
      if (!inside(next)) throw DomainExitError("geodesic left the chart near t = " + std::to_string(t), {s[0], s[1], s[2]});
      s = next;
      t = start.t + (k + 1) * dt;
      record(s, t);
    }
    return traj;
  }

  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<GeoState>>(ctl.abs_tol, ctl.rel_tol);
  double dt = std::min(ctl.initial_step, t_end - t);
  long steps = 0;
  while (t < t_end) {
    if (++steps > ctl.max_steps) throw StepFailureError("geodesic integration exceeded the step budget");
    dt = std::min(dt, t_end - t);
    GeoState trial = s;
    double tt = t;
    ode::controlled_step_result res;
    try {
      res = stepper.try_step(sys, trial, tt, dt);
    } catch (const DomainError&) {
      dt *= 0.5;
      if (dt < ctl.min_step)
        throw DomainExitError("geodesic left the chart near t = " + std::to_string(t), {s[0], s[1], s[2]});
      continue;
    }
    if (res == ode::fail) {
      if (dt < ctl.min_step) throw StepFailureError("step size underflow at t = " + std::to_string(t));
      continue;
    }
    if (!inside(trial)) {
      dt = 0.5 * (tt - t);
      if (dt < ctl.min_step)
        throw DomainExitError("geodesic left the chart near t = " + std::to_string(t), {s[0], s[1], s[2]});
      continue;
    }
    s = trial;
    // Land exactly on t_end instead of accumulating roundoff past it.
    t = (t_end - tt < 1e-12 * std::max(1.0, std::abs(t_end))) ? t_end : tt;
    record(s, t);
  }
  return traj;
}

/// Re-integrates along the trajectory's geodesic with new initial data for
/// f'' = Ric(v, v) f. Returns states whose f_val/f_deriv carry the solution.
inline Trajectory transport_potential(const MetricField& metric, double f0, double f0_deriv, const Trajectory& traj,
                                      const StepControl& ctl = {}) {
  if (traj.states.size() < 2) throw PreconditionError("trajectory has fewer than two states");
  GeodesicState start = traj.states.front();
  start.f_val = f0;
  start.f_deriv = f0_deriv;
  return integrate_geodesic(metric, start, traj.states.back().t, ctl);
}

struct GrowthSample {
  double t = 0.0;
  double f = 0.0;
  double f_deriv = 0.0;
  double h = 0.0;
};

/// Solves f'' = h(t) f on the given increasing sample times.
inline std::vector<GrowthSample> transport_scalar(const std::function<double(double)>& h, double f0, double f0_deriv,
                                                  const std::vector<double>& times, double abs_tol = 1e-13,
                                                  double rel_tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  if (times.size() < 2) throw PreconditionError("need at least two sample times");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PreconditionError("sample times must increase");
  std::vector<GrowthSample> out;
  State s{f0, f0_deriv};
  auto sys = [&](const State& x, State& dx, double t) {
    dx[0] = x[1];
    dx[1] = h(t) * x[0];
  };
  auto obs = [&](const State& x, double t) { out.push_back({t, x[0], x[1], h(t)}); };
  const double dt0 = 1e-3 * (times[1] - times[0]);
  try {
    ode::integrate_times(ode::make_dense_output(abs_tol, rel_tol, ode::runge_kutta_dopri5<State>()), sys, s,
                         times.begin(), times.end(), dt0, obs);
  } catch (const std::exception& e) {
    throw StepFailureError(std::string("scalar transport failed: ") + e.what());
  }
  return out;
}

/// Comparison function w(t) = A t^alpha with alpha (alpha - 1) = epsilon.
struct GrowthBound {
  double epsilon = 0.0;
  double alpha = 1.0;
  double A = 0.0;
  double r0 = 1.0;

  double w(double t) const { return A * std::pow(t, alpha); }
  double w_prime(double t) const { return A * alpha * std::pow(t, alpha - 1.0); }
  double w_second(double t) const { return A * alpha * (alpha - 1.0) * std::pow(t, alpha - 2.0); }
};

inline double growth_alpha(double epsilon) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * epsilon)); }

/// A chosen so that A r0^alpha > a and A alpha r0^(alpha-1) > a, padded by 1e-6.
inline GrowthBound make_growth_bound(double epsilon, double a, double r0) {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  if (!(r0 > 0.0)) throw PreconditionError("r0 must be positive");
  GrowthBound b;
  b.epsilon = epsilon;
  b.alpha = growth_alpha(epsilon);
  b.r0 = r0;
  b.A = std::max(a / std::pow(r0, b.alpha), a / (b.alpha * std::pow(r0, b.alpha - 1.0))) * (1.0 + 1e-6);
  return b;
}

struct GrowthVerdict {
  bool holds = true;
  long violations = 0;
  /// min over samples of w(t) - |f(t)|.
  double min_margin = std::numeric_limits<double>::infinity();
  double min_margin_t = 0.0;
};

/// Checks |f(t) - f(r0)| <= w(t) - w(r0) and |f(t)| <= w(t) on every sample,
/// allowing a relative slack of `rel_tol` times w(t).
inline GrowthVerdict growth_bound_check(const std::vector<GrowthSample>& samples, const GrowthBound& bound,
                                        double rel_tol = 1e-8) {
  if (samples.empty()) throw PreconditionError("no samples");
  const auto& s0 = samples.front();
  std::string failed;
  if (std::abs(s0.t - bound.r0) > 1e-12 * std::max(1.0, bound.r0)) failed += " samples do not start at r0;";
  if (!(std::abs(s0.f) < bound.w(bound.r0))) failed += " |f(r0)| >= w(r0);";
  if (!(std::abs(s0.f_deriv) < bound.w_prime(bound.r0))) failed += " |f'(r0)| >= w'(r0);";
  for (const auto& s : samples) {
    if (std::abs(s.h) > bound.epsilon / (s.t * s.t) * (1.0 + 1e-12)) {
      failed += " |h(t)| > eps t^-2 at t = " + std::to_string(s.t) + ";";
      break;
    }
  }
  if (!failed.empty()) throw PreconditionError("growth bound hypotheses fail:" + failed);

  GrowthVerdict v;
  const double w0 = bound.w(bound.r0);
  for (const auto& s : samples) {
    const double w = bound.w(s.t);
    const double slack = rel_tol * w;
    const double margin = w - std::abs(s.f);
    if (margin < v.min_margin) {
      v.min_margin = margin;
      v.min_margin_t = s.t;
    }
    if (std::abs(s.f - s0.f) > (w - w0) + slack || std::abs(s.f) > w + slack) ++v.violations;
  }
  v.holds = v.violations == 0;
  return v;
}

/// Growth samples read off a transported trajectory.
inline std::vector<GrowthSample> growth_samples(const Trajectory& traj) {
  std::vector<GrowthSample> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back({s.t, s.f_val, s.f_deriv, s.h_val});
  return out;
}

}  // namespace staticpot
