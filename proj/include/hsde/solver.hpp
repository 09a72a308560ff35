#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hsde/coefficients.hpp"
#include "hsde/noise.hpp"

namespace hsde {

/// One solvable instance. xi and kappa are fixed when the problem is built,
/// before any noise is drawn.
struct SolveProblem {
  CoefficientEvaluator evaluator;
  LevyModel model;
  Eigen::VectorXd kappa;
  double horizon = 1.0;
  int steps = 1;

  void validate() const;
  void require_matching(const NoiseRealization& noise) const;
};

struct LargeJumpApplication {
  double time = 0.0;
  Eigen::VectorXd mark;
  Eigen::VectorXd pre_state;
  Eigen::VectorXd post_state;
};

struct ExplosionInfo {
  std::vector<double> levels;
  std::vector<double> theta;  // grid/jump crossing time per level, in level order
  double eta_theta_max = std::numeric_limits<double>::infinity();
  double eta_estimate = std::numeric_limits<double>::infinity();
  bool exploded = false;
};

/// rcll solution path: the state stored at a jump time is the post-jump
/// value. Once a state is set to infinity it stays infinite.
struct PathRecord {
  std::vector<double> times;
  Eigen::MatrixXd states;  // times.size() x dim
  std::vector<char> is_large_jump;
  std::vector<LargeJumpApplication> large_jumps;
  std::optional<ExplosionInfo> explosion;
  bool overflow = false;  // numerical blow-up, distinct from modeled explosion
  double overflow_time = std::numeric_limits<double>::infinity();

  int dim() const { return static_cast<int>(states.cols()); }
  Eigen::VectorXd state_at(int i) const { return states.row(i).transpose(); }
  double sup_distance(const PathRecord& other) const;
  bool bit_identical(const PathRecord& other) const;
};

/// Explicit left-point scheme for the reduced equation (large jumps ignored):
///   U_{k+1} = U_k + b(U_k) dt + sigma(U_k) dB_k
///           + sum_{small events in (t_k, t_{k+1}]} F(U_k, x)
///           - dt * integral of F(U_k, .) against nu.
PathRecord solve_reduced_euler(const SolveProblem& prob, const NoiseRealization& noise);

struct PicardTrace {
  int iterations = 0;
  std::vector<double> sup_deltas;  // e_k = sup over grid of |U^{(k+1)} - U^{(k)}|
  bool converged = false;
  double fitted_contraction = 0.0;  // diagnostic rate from the e_k sequence
};

/// Fixed-point iteration on the frozen noise: each iterate integrates the
/// previous iterate's path through the same discretized integrals as
/// solve_reduced_euler, starting from U^{(0)} = kappa. The fixed point is
/// the self-consistent discrete path.
std::pair<PathRecord, PicardTrace> picard_solve(const SolveProblem& prob,
                                                const NoiseRealization& noise, int k_max = 50,
                                                double tol = 1e-10);

/// Jump application shared by the interlacing construction; exposed so the
/// harness can replay it against the independent integrator's states.
Eigen::VectorXd apply_large_jump(const CoefficientEvaluator& ev, const Eigen::VectorXd& pre,
                                 const Eigen::VectorXd& mark);

/// Full-equation solution by interlacing: reduced segments on shifted views
/// between consecutive large-jump times, with U_eta = U_eta- + G(U_eta-, x)
/// applied exactly at each arrival. With no large events this runs the same
/// single-segment code path as solve_reduced_euler, bit for bit.
PathRecord interlace_solve(const SolveProblem& prob, const NoiseRealization& noise);

/// Radial truncation of the state-dependent coefficients:
///   f^R(z) = f(z)                     for |z| <= R (same bits),
///          = ((2R-|z|)/R) f(R z/|z|)  for R <= |z| <= 2R,
///          = 0                        for |z| >= 2R.
/// The large-jump map is left untouched; interlacing handles large jumps.
CoefficientEvaluator truncate_coeffs(const CoefficientEvaluator& ev, double radius);

/// Local-Lipschitz construction: solves with truncate_coeffs(., m) per level,
/// records theta_m = first grid/jump time with |X^m| >= m, verifies that
/// consecutive levels agree exactly on [0, theta_m], and pastes the final
/// path. When the theta_m sequence stabilizes below the horizon the path is
/// sent to infinity beyond the estimated explosion time.
PathRecord solve_local(const SolveProblem& prob, const NoiseRealization& noise,
                       const std::vector<double>& m_levels);

/// chi_k localization of the initial distribution-valued parameter:
/// xi if ||xi||_{regularity} <= k, else the zero element.
ExpansionVector localize_xi(const ExpansionVector& xi, double k);

/// kappa if |kappa| <= level (closed condition), else zero.
Eigen::VectorXd localize_kappa(const Eigen::VectorXd& kappa, double level);

/// CSV form: t, U_1..U_d, is_large_jump; infinite states print as `inf`.
std::string path_to_csv(const PathRecord& path);

}  // namespace hsde
