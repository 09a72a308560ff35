#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hsde/expansion.hpp"
#include "hsde/translation.hpp"

namespace hsde {

/// Distribution-valued SDE data: sigma is a d x d matrix of S_p elements,
/// b a d-vector, beta the declared common norm bound, p > 0 the regularity
/// order. All entries share dim and cutoff.
struct DistributionCoefficientSet {
  int dim = 1;
  int cutoff = 0;
  double regularity = 1.0;  // p
  double beta = 0.0;
  std::vector<ExpansionVector> sigma;  // row-major d x d
  std::vector<ExpansionVector> b;      // d entries

  const ExpansionVector& sigma_at(int i, int j) const {
    return sigma[static_cast<std::size_t>(i * dim + j)];
  }
  ExpansionVector& sigma_at(int i, int j) { return sigma[static_cast<std::size_t>(i * dim + j)]; }

  /// Throws unless beta >= max over all entry norms and shapes agree.
  void validate() const;

  /// Smallest admissible beta: max over all ||sigma_ij||_p, ||b_i||_p.
  double min_beta() const;
};

DistributionCoefficientSet make_coefficient_set(int dim, int cutoff, double regularity);

std::string to_text(const DistributionCoefficientSet& c);
DistributionCoefficientSet coefficient_set_from_text(const std::string& text);

/// Small-jump family F(y, x) = x g(<phi, y>) with g(u) clamped-linear:
/// g(u) = clamp(offset + slope u, -bound, bound). Satisfies F1-F3 by
/// construction with declared profile C_x = |x| slope ||phi||_{p+1/2}.
struct SmallJumpFamily {
  ExpansionVector phi;
  double slope = 1.0;
  double bound = 1.0;
  double offset = 0.0;
  double regularity = 1.0;  // p of the ambient S_{-p} argument

  double gain(double u) const {
    const double v = offset + slope * u;
    return v > bound ? bound : (v < -bound ? -bound : v);
  }

  /// Declared Lipschitz profile C_x of F1.
  double lipschitz_profile(const Eigen::VectorXd& x) const {
    return x.norm() * slope * norm_p(phi, regularity + 0.5);
  }

  Eigen::VectorXd evaluate(const ExpansionVector& y, const Eigen::VectorXd& x) const {
    return x * gain(dual_pair(phi, y));
  }
};

/// Large-jump family: either the state-independent map G(y, x) = x or the
/// bounded-gain map G(y, x) = x (1 + tanh <phi, y>). Continuous in y (G1).
struct LargeJumpFamily {
  enum class Kind { kIdentity, kTanhGain };
  Kind kind = Kind::kIdentity;
  ExpansionVector phi;

  Eigen::VectorXd evaluate(const ExpansionVector& y, const Eigen::VectorXd& x) const {
    if (kind == Kind::kIdentity) return x;
    return x * (1.0 + std::tanh(dual_pair(phi, y)));
  }
};

/// b-bar(z; xi)_i = dual_pair(b_i, tau_z xi).
Eigen::VectorXd lift_drift(const DistributionCoefficientSet& coeffs, const Eigen::VectorXd& z,
                           const ExpansionVector& xi, const QuadratureRule& rule);

/// sigma-bar(z; xi)_ij = dual_pair(sigma_ij, tau_z xi).
Eigen::MatrixXd lift_diffusion(const DistributionCoefficientSet& coeffs, const Eigen::VectorXd& z,
                               const ExpansionVector& xi, const QuadratureRule& rule);

/// F-bar(z, x; xi) = F(tau_z xi, x); requires 0 < |x| < 1.
Eigen::VectorXd lift_small_jump(const SmallJumpFamily& fam, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& x, const ExpansionVector& xi,
                                const QuadratureRule& rule);

/// G-bar(z, x; xi) = G(tau_z xi, x); requires |x| >= 1.
Eigen::VectorXd lift_large_jump(const LargeJumpFamily& fam, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& x, const ExpansionVector& xi,
                                const QuadratureRule& rule);

/// Uniform evaluation surface consumed by the solvers. Lifted evaluators are
/// pure and shareable across threads; `synthetic` marks test doubles that do
/// not claim the lifted structure or its hypotheses.
struct CoefficientEvaluator {
  int dim = 1;
  bool synthetic = false;
  std::string label;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> diffusion;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> small_jump;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> large_jump;
};

/// Binds a coefficient set, jump families and a fixed xi into a state-only
/// evaluator. T(z) is memoized in a shared bounded LRU cache so the drift,
/// diffusion and jump lifts at one state share a single quadrature pass.
CoefficientEvaluator make_lifted_evaluator(const DistributionCoefficientSet& coeffs,
                                           std::optional<SmallJumpFamily> fam_f,
                                           std::optional<LargeJumpFamily> fam_g,
                                           const ExpansionVector& xi, const QuadratureRule& rule,
                                           std::size_t cache_capacity = 1024);

/// Test doubles (synthetic = true): not claimed to satisfy the lifted
/// hypotheses. Cubic drift |z|^2 z deliberately violates linear growth.
CoefficientEvaluator make_constant_drift_evaluator(const Eigen::VectorXd& c);
CoefficientEvaluator make_cubic_drift_evaluator(int dim, double scale = 1.0);

}  // namespace hsde
