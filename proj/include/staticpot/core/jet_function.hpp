#pragma once

#include <functional>
#include <type_traits>
#include <utility>

#include "staticpot/core/tensor.hpp"

namespace staticpot {

template <class S>
using ScalarOut = S;
template <class S>
using MatrixOut = Mat3<S>;

/// Type-erased function of a point that can be evaluated at every scalar type
/// the library differentiates with (double, D1, D2, D3). Built from a generic
/// callable, which is instantiated once per scalar type.
template <template <class> class Out>
class JetFunction {
 public:
  JetFunction() = default;

  template <class F>
    requires(!std::is_same_v<std::decay_t<F>, JetFunction>)
  explicit JetFunction(F f) : f0_(f), f1_(f), f2_(f), f3_(std::move(f)) {}

  template <class S>
  Out<S> operator()(const Vec3<S>& x) const {
    if constexpr (std::is_same_v<S, double>) {
      return f0_(x);
    } else if constexpr (std::is_same_v<S, D1>) {
      return f1_(x);
    } else if constexpr (std::is_same_v<S, D2>) {
      return f2_(x);
    } else {
      static_assert(std::is_same_v<S, D3>, "unsupported scalar type");
      return f3_(x);
    }
  }

  explicit operator bool() const { return static_cast<bool>(f0_); }

 private:
  std::function<Out<double>(const Vec3<double>&)> f0_;
  std::function<Out<D1>(const Vec3<D1>&)> f1_;
  std::function<Out<D2>(const Vec3<D2>&)> f2_;
  std::function<Out<D3>(const Vec3<D3>&)> f3_;
};

using ScalarJetFunction = JetFunction<ScalarOut>;
using MatrixJetFunction = JetFunction<MatrixOut>;

/// Value, gradient and Hessian of a scalar at a point.
struct ScalarJet2 {
  double value = 0.0;
  Vec3d grad{};
  Mat3d hess{};
};

inline ScalarJet2 scalar_jet(const ScalarJetFunction& f, const Vec3d& p) {
  const D2 r = f(seeded_point<D2>(p));
  ScalarJet2 j;
  j.value = r.v.v;
  for (int a = 0; a < 3; ++a) {
    j.grad[a] = r.d[a].v;
    for (int b = 0; b < 3; ++b) j.hess[a][b] = r.d[a].d[b];
  }
  return j;
}

}  // namespace staticpot
