#include "hsde/quadrature.hpp"

namespace hsde {

QuadratureRule gauss_legendre(int n, double halfwidth) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  if (halfwidth <= 0) throw std::invalid_argument("gauss_legendre: halfwidth must be positive");
  Eigen::VectorXd x, w;
  gauss_legendre_unit<double>(n, x, w);
  QuadratureRule rule;
  rule.nodes = x * halfwidth;
  rule.weights = w * halfwidth;
  rule.halfwidth = halfwidth;
  return rule;
}

QuadratureRule default_rule(int cutoff, double zmax) {
  if (cutoff < 0) throw std::invalid_argument("default_rule: cutoff must be >= 0");
  if (zmax < 0) throw std::invalid_argument("default_rule: zmax must be >= 0");
  const double base = std::sqrt(4.0 * cutoff + 6.0);
  const double halfwidth = base + zmax;
  const int base_nodes = 5 * cutoff + 1;
  // Keep node density at the zmax = 0 level as the interval widens; a fixed
  // count under-resolves the h_N oscillation once halfwidth grows.
  const int n = std::max(base_nodes, static_cast<int>(std::ceil(base_nodes * halfwidth / base)));
  return gauss_legendre(n, halfwidth);
}

}  // namespace hsde
