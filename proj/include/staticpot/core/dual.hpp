#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace staticpot {

/// Forward-mode dual number carrying a value and its gradient with respect to
/// the three chart coordinates. Nesting (Dual<Dual<double>>) yields exact
/// higher derivatives: each nesting level adds one derivative order.
template <class T>
struct Dual {
  T v{};
  std::array<T, 3> d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT: constants promote implicitly
  constexpr explicit Dual(const T& value)
    requires(!std::is_same_v<T, double>)
      : v(value) {}
  constexpr Dual(const T& value, const std::array<T, 3>& grad) : v(value), d(grad) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < 3; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < 3; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (int i = 0; i < 3; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
    return r;
  }

  friend Dual operator+(Dual a, double c) { a.v += c; return a; }
  friend Dual operator+(double c, Dual a) { a.v += c; return a; }
  friend Dual operator-(Dual a, double c) { a.v -= c; return a; }
  friend Dual operator-(double c, const Dual& a) { return Dual(c) - a; }
  friend Dual operator*(Dual a, double c) {
    a.v *= c;
    for (auto& x : a.d) x *= c;
    return a;
  }
  friend Dual operator*(double c, const Dual& a) { return a * c; }
  friend Dual operator/(Dual a, double c) { return a * (1.0 / c); }
  friend Dual operator/(double c, const Dual& a) { return Dual(c) / a; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

/// Derivative order carried by a scalar type.
template <class T>
struct dual_order : std::integral_constant<int, 0> {};
template <class T>
struct dual_order<Dual<T>> : std::integral_constant<int, 1 + dual_order<T>::value> {};

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

/// Coordinate x_i seeded so that every nesting level differentiates along e_i.
template <class S>
S make_variable(double x, int i) {
  if constexpr (std::is_same_v<S, double>) {
    (void)i;
    return x;
  } else {
    using T = decltype(S{}.v);
    S r(make_variable<T>(x, i));
    r.d[i] = T(1.0);
    return r;
  }
}

// Elementary functions. Chain rule applied one level at a time; nested levels
// recurse through the inner type's overloads.

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  Dual<T> r;
  r.v = sqrt(a.v);
  const T s = 0.5 / r.v;
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * s;
  return r;
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  Dual<T> r;
  r.v = log(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] / a.v;
  return r;
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  Dual<T> r;
  r.v = exp(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * r.v;
  return r;
}

template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  Dual<T> r;
  r.v = pow(a.v, p);
  const T slope = p * pow(a.v, p - 1.0);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * slope;
  return r;
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  Dual<T> r;
  r.v = sin(a.v);
  const T c = cos(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * c;
  return r;
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  Dual<T> r;
  r.v = cos(a.v);
  const T s = -sin(a.v);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * s;
  return r;
}

/// Integer power by repeated multiplication; valid for negative bases.
template <class S>
S ipow(const S& a, int n) {
  if (n < 0) return S(1.0) / ipow(a, -n);
  S r(1.0);
  S base = a;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

}  // namespace staticpot
