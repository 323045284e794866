#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "staticpot/core/errors.hpp"
#include "staticpot/core/tensor.hpp"

namespace staticpot {

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw PreconditionError("Gauss-Legendre rule needs at least one node");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      jacobi(k, k - 1) = b;
      jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
      nodes[k] = es.eigenvalues()(k);
      const double v = es.eigenvectors()(0, k);
      weights[k] = 2.0 * v * v;
    }
  }

  /// Nodes and weights mapped to [a, b].
  std::vector<std::pair<double, double>> on(double a, double b) const {
    std::vector<std::pair<double, double>> out(nodes.size());
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < nodes.size(); ++k) out[k] = {mid + half * nodes[k], half * weights[k]};
    return out;
  }
};

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times the
/// uniform rule in azimuth. Weights sum to 4 pi.
struct SphereRule {
  struct Node {
    Vec3d n;
    double weight;
  };
  int n_theta = 32;
  int n_phi = 64;
  std::vector<Node> nodes;

  SphereRule(int nt = 32, int np = 64) : n_theta(nt), n_phi(np) {
    if (nt < 1 || np < 1) throw PreconditionError("sphere rule needs positive node counts");
    const GaussLegendre gl(nt);
    nodes.reserve(static_cast<std::size_t>(nt) * np);
    const double dphi = 2.0 * std::numbers::pi / np;
    for (int i = 0; i < nt; ++i) {
      const double ct = gl.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < np; ++j) {
        const double phi = (j + 0.5) * dphi;
        nodes.push_back({{st * std::cos(phi), st * std::sin(phi), ct}, gl.weights[i] * dphi});
      }
    }
  }

  SphereRule doubled() const { return SphereRule(2 * n_theta, 2 * n_phi); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.weight * f(nd.n);
    return s;
  }

  template <class F>
  double average(F&& f) const {
    return integrate(std::forward<F>(f)) / (4.0 * std::numbers::pi);
  }
};

/// Quadrature resolution for sphere and annulus integrals.
struct QuadratureSpec {
  int n_theta = 32;
  int n_phi = 64;
  int n_radial = 48;
  /// Upper bound on integrand evaluations per integral.
  long budget = 20'000'000;

  long cost_volume() const { return static_cast<long>(n_theta) * n_phi * n_radial; }
  QuadratureSpec doubled() const { return {2 * n_theta, 2 * n_phi, 2 * n_radial, budget}; }
};

}  // namespace staticpot
