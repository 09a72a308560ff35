#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "hsde/multi_index.hpp"

namespace hsde {

// Orthonormal Hermite functions on L^2(R):
//   h_0(t) = pi^{-1/4} e^{-t^2/2},  h_1(t) = sqrt(2) t h_0(t),
//   h_{k+1}(t) = t sqrt(2/(k+1)) h_k(t) - sqrt(k/(k+1)) h_{k-1}(t).
// The recurrence is used throughout instead of factorial formulas so that
// orders up to a few hundred stay inside double range.

template <typename Scalar>
Scalar hermite_eval_1d(int n, Scalar t) {
  const Scalar h0 = Scalar(std::pow(M_PI, -0.25L)) * std::exp(-t * t / Scalar(2));
  if (n == 0) return h0;
  Scalar prev = h0;
  Scalar cur = std::sqrt(Scalar(2)) * t * h0;
  for (int k = 1; k < n; ++k) {
    Scalar next = t * std::sqrt(Scalar(2) / Scalar(k + 1)) * cur -
                  std::sqrt(Scalar(k) / Scalar(k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Table of h_0..h_nmax at the given points; column n holds h_n over points.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hermite_table(
    int nmax, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& pts) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat table(pts.size(), nmax + 1);
  table.col(0) = Scalar(std::pow(M_PI, -0.25L)) *
                 (-pts.array().square() / Scalar(2)).exp();
  if (nmax >= 1) table.col(1) = std::sqrt(Scalar(2)) * pts.array() * table.col(0).array();
  for (int k = 1; k < nmax; ++k) {
    table.col(k + 1) = std::sqrt(Scalar(2) / Scalar(k + 1)) * pts.array() * table.col(k).array() -
                       std::sqrt(Scalar(k) / Scalar(k + 1)) * table.col(k - 1).array();
  }
  return table;
}

/// h_n(x) = h_{n_1}(x_1) ... h_{n_d}(x_d).
double hermite_eval(const MultiIndex& n, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Largest classical turning point sqrt(2N+d); Hermite functions of order
/// <= N decay super-exponentially beyond it.
inline double hermite_turning_point(int cutoff, int dim) {
  return std::sqrt(2.0 * cutoff + dim);
}

}  // namespace hsde
