#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "staticpot/core/dual.hpp"

namespace staticpot {

template <class S>
using Vec3 = std::array<S, 3>;
template <class S>
using Mat3 = std::array<std::array<S, 3>, 3>;
template <class S>
using Tensor3 = std::array<Mat3<S>, 3>;
template <class S>
using Tensor4 = std::array<Tensor3<S>, 3>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template <class S>
constexpr Mat3<S> zero_matrix() {
  Mat3<S> m;
  for (auto& row : m) row.fill(S(0.0));
  return m;
}

template <class S>
constexpr Mat3<S> identity_matrix() {
  Mat3<S> m = zero_matrix<S>();
  for (int i = 0; i < 3; ++i) m[i][i] = S(1.0);
  return m;
}

inline double kronecker(int i, int j) { return i == j ? 1.0 : 0.0; }

template <class S>
S dot(const Vec3<S>& a, const Vec3<S>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class S>
S determinant(const Mat3<S>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Inverse by adjugate. Callers guarantee non-singularity (metrics are
/// checked positive definite before reaching here).
template <class S>
Mat3<S> inverse(const Mat3<S>& m) {
  const S inv_det = S(1.0) / determinant(m);
  Mat3<S> r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
  return r;
}

template <class S>
Mat3<S> transpose(const Mat3<S>& m) {
  Mat3<S> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

template <class S>
Mat3<S> matmul(const Mat3<S>& a, const Mat3<S>& b) {
  Mat3<S> r = zero_matrix<S>();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

template <class S>
Vec3<S> matvec(const Mat3<S>& a, const Vec3<S>& v) {
  Vec3<S> r{S(0.0), S(0.0), S(0.0)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += a[i][j] * v[j];
  return r;
}

/// Bilinear form a(u, w) = u^i a_ij w^j.
template <class S>
S bilinear(const Mat3<S>& a, const Vec3<S>& u, const Vec3<S>& w) {
  S r(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r += u[i] * a[i][j] * w[j];
  return r;
}

inline double frobenius_norm(const Mat3d& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double x : row) s += x * x;
  return std::sqrt(s);
}

inline double max_abs(const Mat3d& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double x : row) s = std::max(s, std::abs(x));
  return s;
}

inline Vec3d operator+(const Vec3d& a, const Vec3d& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3d operator-(const Vec3d& a, const Vec3d& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3d operator*(double c, const Vec3d& a) { return {c * a[0], c * a[1], c * a[2]}; }
inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }

inline Mat3d operator-(const Mat3d& a, const Mat3d& b) {
  Mat3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}
inline Mat3d operator+(const Mat3d& a, const Mat3d& b) {
  Mat3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}
inline Mat3d operator*(double c, const Mat3d& a) {
  Mat3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = c * a[i][j];
  return r;
}

template <class S>
Mat3<double> values_of(const Mat3<S>& m) {
  Mat3<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = value_of(m[i][j]);
  return r;
}

template <class S>
Vec3<S> seeded_point(const Vec3d& p) {
  return {make_variable<S>(p[0], 0), make_variable<S>(p[1], 1), make_variable<S>(p[2], 2)};
}

}  // namespace staticpot
