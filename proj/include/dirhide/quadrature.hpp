#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "dirhide/errors.hpp"

namespace dirhide::quadrature {

struct Node {
  Eigen::Vector3d direction;
  double weight = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw DomainError("Gauss-Legendre needs at least one node");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform grid in phi. Integrates spherical harmonics up to `degree`
/// exactly; weights sum to 1 (normalized measure).
class SphereQuadrature {
 public:
  explicit SphereQuadrature(int degree) : degree_(degree) {
    if (degree < 0) throw DomainError("quadrature degree must be non-negative");
    const int n_theta = degree / 2 + 1;
    const int n_phi = degree + 1;
    std::vector<double> x, w;
    gauss_legendre(n_theta, x, w);
    nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
      for (int k = 0; k < n_phi; ++k) {
        const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_phi;
        nodes_.push_back({{s * std::cos(phi), s * std::sin(phi), x[i]}, 0.5 * w[i] / n_phi});
      }
    }
  }

  int degree() const { return degree_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  int degree_;
  std::vector<Node> nodes_;
};

}  // namespace dirhide::quadrature
