#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace hsde {

/// Gauss-Legendre rule on [-halfwidth, halfwidth], one axis. Tensorized over
/// axes by the callers that integrate in d dimensions.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  double halfwidth = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }

  void require_nodes_for(int cutoff) const {
    if (size() < 2 * cutoff + 1)
      throw std::invalid_argument("QuadratureRule: need at least 2*cutoff+1 nodes");
  }
};

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
template <typename Scalar>
void gauss_legendre_unit(int n, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                         Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& w) {
  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess, then Newton on the Legendre recurrence.
    Scalar z = std::cos(Scalar(M_PI) * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar pp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p1 = 1, p2 = 0;
      for (int j = 0; j < n; ++j) {
        Scalar p3 = p2;
        p2 = p1;
        p1 = ((Scalar(2 * j + 1)) * z * p2 - Scalar(j) * p3) / Scalar(j + 1);
      }
      pp = Scalar(n) * (z * p1 - p2) / (z * z - Scalar(1));
      Scalar dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < Scalar(1e-17)) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = Scalar(2) / ((Scalar(1) - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

QuadratureRule gauss_legendre(int n, double halfwidth);

/// Default rule for expansions truncated at `cutoff`, usable for translations
/// up to |z| <= zmax: halfwidth sqrt(4N+6)+zmax, with the node count scaled
/// in proportion to the halfwidth so node density never drops below the
/// density of the 5N+1 baseline rule.
QuadratureRule default_rule(int cutoff, double zmax = 0.0);

}  // namespace hsde
