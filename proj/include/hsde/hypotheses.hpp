#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsde/coefficients.hpp"
#include "hsde/noise.hpp"

namespace hsde {

/// Numerical audit of the standing hypotheses on a coefficient set and jump
/// families: the declared norm bound beta, the small-jump Lipschitz profile
/// C_x with its integrability, the behavior at the zero element, alpha(K)
/// over a bounded parameter set K, and empirical state-Lipschitz constants
/// C(K) / C(K, n) of the lifted coefficients.
struct HypothesisReport {
  double beta = 0.0;
  double beta_min = 0.0;       // tightest admissible bound from the entry norms
  double sup_cx_atoms = 0.0;   // declared C_x maximized over the atoms of nu
  double sup_cx_family = 0.0;  // declared profile maximized over |x| < 1
  double integral_cx2 = 0.0;   // sum of C_x^2 over the atomic nu
  double sup_f0 = 0.0;         // sup over atoms of |F(0, x)|
  double integral_f02 = 0.0;
  double integral_f04 = 0.0;   // fourth moment, reported for completeness
  double alpha_k = 0.0;        // sup over K of the nu-integral of |F(y, x)|^2
  double lipschitz_global = 0.0;             // C(K) over the largest probed ball
  std::map<double, double> lipschitz_local;  // radius n -> C(K, n)
  double g1_continuity_drop = 0.0;  // ratio of large-jump z-increments at shrinking deltas

  bool sigma_b_ok = false;
  bool f1_ok = false;
  bool f2_ok = false;
  bool f3_ok = false;
  bool g1_ok = false;
  bool pass = false;

  int pair_samples = 0;
  std::uint64_t sample_seed = 0;

  std::string to_text() const;  // structured text, full precision
};

/// Runs the audit. K is a non-empty list of parameter elements bounded in
/// the dual norm; radii are the balls O(0, n) probed for C(K, n). Sampling
/// is driven by `seed` only, so reports reproduce bit-for-bit.
HypothesisReport verify_hypotheses(const DistributionCoefficientSet& coeffs,
                                   const std::optional<SmallJumpFamily>& fam_f,
                                   const std::optional<LargeJumpFamily>& fam_g,
                                   const LevyModel& model, const std::vector<ExpansionVector>& K,
                                   const std::vector<double>& radii, int pair_samples = 200,
                                   std::uint64_t seed = 2024);

}  // namespace hsde
