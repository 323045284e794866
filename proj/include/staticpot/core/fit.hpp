#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "staticpot/core/errors.hpp"

namespace staticpot {

/// Least-squares fit of y against the inverse-power basis {1, 1/x, ..., 1/x^(terms-1)}.
/// Returns the coefficients; coefficient 0 is the extrapolated value at x -> infinity.
struct InversePowerFit {
  std::vector<double> coefficients;
  double residual_norm = 0.0;
  double condition_number = 1.0;
};

inline InversePowerFit fit_inverse_powers(std::span<const double> x, std::span<const double> y, int terms) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < terms) throw IllConditionedFitError("fewer samples than basis terms");
  // Work in u = x_min / x so the columns stay O(1); coefficient k of 1/x^k is c_k x_min^k.
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, 1.0 / std::abs(xi));
  Eigen::MatrixXd a(n, terms);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = 1.0 / (x[i] * scale);
    double p = 1.0;
    for (int k = 0; k < terms; ++k) {
      a(i, k) = p;
      p *= u;
    }
    b(i) = y[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  InversePowerFit fit;
  fit.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(fit.condition_number) || fit.condition_number > 1e12)
    throw IllConditionedFitError("inverse-power fit is ill-conditioned (cond = " + std::to_string(fit.condition_number) + ")");
  const Eigen::VectorXd c = svd.solve(b);
  fit.residual_norm = (a * c - b).norm();
  fit.coefficients.resize(terms);
  double p = 1.0;
  for (int k = 0; k < terms; ++k) {
    fit.coefficients[k] = c(k) * p;
    p /= scale;
  }
  return fit;
}

/// Richardson-style extrapolation to x -> infinity with `terms` inverse powers.
inline double extrapolate_to_infinity(std::span<const double> x, std::span<const double> y, int terms = 2) {
  return fit_inverse_powers(x, y, terms).coefficients[0];
}

/// Least-squares slope of log|y| against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2) throw IllConditionedFitError("log-log slope needs at least two samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(y[i]) > 0.0)) return -std::numeric_limits<double>::infinity();
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw IllConditionedFitError("log-log slope with coincident abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace staticpot
