#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsde/hypotheses.hpp"
#include "hsde/solver.hpp"

namespace hsde {

/// Result of one harness check. `scalars` keeps insertion order so report
/// files are stable; pass holds iff the stated tolerance is met.
struct CheckReport {
  std::string id;
  std::uint64_t inputs_digest = 0;
  std::vector<std::pair<std::string, double>> scalars;
  double tolerance = 0.0;
  bool pass = false;
  bool negative_control = false;  // expected to fail; exit-code handling inverts
  std::string note;

  void add(const std::string& key, double v) { scalars.emplace_back(key, v); }
  double get(const std::string& key) const;
  std::string to_json() const;
};

std::uint64_t digest_bytes(const std::string& bytes);

/// Fits the minimal D with |b|^2 + |sigma|^2 + integral |F|^2 dnu <= D (1+|z|^2)
/// over sampled states. Passes when D is finite, stable under doubling the
/// sample count, and stable under doubling the sample radius; a coefficient
/// field with super-linear growth fails the radius-doubling probe. When
/// `analytic_bound` > 0 the fitted D must also sit below it.
CheckReport check_growth_bound(const CoefficientEvaluator& ev, const LevyModel& model,
                               double radius, int samples, std::uint64_t seed,
                               double analytic_bound = 0.0);

/// Pathwise-uniqueness surrogate: the Picard fixed point against the
/// independent inline integrator on identical noise, one grid size per entry
/// of m_list. Passes when the replication-averaged sup-distances decrease
/// monotonically and the finest one is below `tol_final`. The problem must
/// have no large-jump activity (the Picard scheme solves the reduced
/// equation). `mismatched_seeds` is the adversarial control: the two
/// integrators are fed different realizations and the check must fail.
CheckReport check_uniqueness(const SolveProblem& prob, const std::vector<int>& m_list,
                             int replications, std::uint64_t seed, double tol_final,
                             bool mismatched_seeds = false, int threads = 1);

/// Envelope check on the replication-averaged squared Picard increments:
/// mean e_k^2 <= A (Ctilde T)^{k+1} / (k+1)! with A fitted at k = 1 and
/// Ctilde supplied from the Lipschitz report.
CheckReport check_picard_decay(const SolveProblem& prob, int replications, std::uint64_t seed,
                               double c_tilde, int k_max = 50, double tol = 1e-10);

/// Interlacing against the inline integrator on identical noise. The
/// distance tolerance is 5 dt L with L the inline path's max per-step
/// displacement rate; post-jump states must match to 1e-12 when the
/// interlacing jump application is replayed on the inline pre-jump states.
CheckReport check_interlace(const SolveProblem& prob, int replications, std::uint64_t seed);

/// Property-tests the two geometric truncation inequalities on random pairs
/// with |z1| <= R <= |z2| <= 2R, verifies h^R == h bit-exactly inside the
/// radius, and bounds the empirical nu-integrated Lipschitz constant of the
/// truncated small-jump lift by 6 C(K,R) + 4 alpha(K) / R^2.
CheckReport check_truncation(const CoefficientEvaluator& ev, const LevyModel& model, double radius,
                             int samples, std::uint64_t seed, double c_k_r, double alpha_k);

std::string reports_to_json(const std::vector<CheckReport>& reports);

}  // namespace hsde
