#include <doctest.h>

#include "hsde/checks.hpp"
#include "test_support.hpp"

using namespace hsde;
using hsde_test::preset_config;
using hsde_test::vec1;

TEST_CASE("growth bound: zero coefficients fit D = 0 and pass") {
  const CoefficientEvaluator zero = make_constant_drift_evaluator(vec1(0.0));
  LevyModel m;
  m.dim = 1;
  const CheckReport rep = check_growth_bound(zero, m, 3.0, 100, 5);
  CHECK(rep.pass);
  CHECK(rep.get("D") == 0.0);
}

TEST_CASE("growth bound: lifted preset passes under the assembled analytic budget") {
  const RunConfig config = preset_config(64);
  const SolveProblem prob = build_problem(config);
  const std::vector<ExpansionVector> K{config.xi};
  const HypothesisReport hyp = verify_hypotheses(config.coefficients, config.family_f,
                                                 config.family_g, config.levy, K, {3.0}, 200, 5);
  const double xin = norm_p(config.xi, config.xi.regularity);
  double q0 = config.coefficients.beta * config.coefficients.beta * xin * xin * 2.0;
  for (const auto& a : config.levy.small_atoms) {
    const double cx = config.family_f->lipschitz_profile(a.mark);
    const double f0 =
        config.family_f->evaluate(zero_expansion(1, config.cutoff, -1.0), a.mark).norm();
    q0 += (cx * xin + f0) * (cx * xin + f0) * a.intensity;
  }
  const double analytic = 2.0 * std::max(hyp.lipschitz_global, q0);
  const CheckReport rep = check_growth_bound(prob.evaluator, config.levy, 3.0, 200, 5, analytic);
  CHECK(rep.pass);
  CHECK(rep.get("D") <= analytic);
}

TEST_CASE("growth bound: cubic drift is the failing negative control") {
  const CoefficientEvaluator cubic = make_cubic_drift_evaluator(1, 1.0);
  LevyModel m;
  m.dim = 1;
  const CheckReport rep = check_growth_bound(cubic, m, 3.0, 200, 5);
  CHECK_FALSE(rep.pass);
  CHECK(rep.get("D_double_radius") > 2.0 * rep.get("D"));
}

TEST_CASE("uniqueness check: zero-distance floor and generic decay") {
  SolveProblem trivial;
  trivial.evaluator = make_constant_drift_evaluator(vec1(0.4));
  trivial.model.dim = 1;
  trivial.kappa = vec1(0.0);
  trivial.horizon = 1.0;
  const CheckReport flat = check_uniqueness(trivial, {16, 32, 64}, 3, 3, 1e-3);
  CHECK(flat.pass);
  CHECK(flat.get("final_mean") <= 1e-13);

  const RunConfig config = preset_config(64);
  SolveProblem prob = build_problem(config);
  const CheckReport rep = check_uniqueness(prob, {64, 256, 1024}, 8, 11, 2e-3);
  CHECK(rep.pass);
  CHECK(rep.get("mean_sup_distance_M64") > rep.get("mean_sup_distance_M1024"));
}

TEST_CASE("uniqueness check: mismatched seeds must fail (adversarial control)") {
  const RunConfig config = preset_config(64);
  const SolveProblem prob = build_problem(config);
  const CheckReport rep = check_uniqueness(prob, {64, 256}, 3, 13, 1e-3,
                                           /*mismatched_seeds=*/true);
  CHECK(rep.negative_control);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("uniqueness check rejects problems with large-jump activity") {
  const RunConfig config = preset_config(64, /*large_rate=*/2.0);
  const SolveProblem prob = build_problem(config);
  CHECK_THROWS_AS(check_uniqueness(prob, {64}, 1, 1, 1e-3), std::invalid_argument);
}

TEST_CASE("picard decay: zero problem passes, preset sits under the envelope") {
  SolveProblem trivial;
  trivial.evaluator = make_constant_drift_evaluator(vec1(0.0));
  trivial.model.dim = 1;
  trivial.kappa = vec1(2.0);
  trivial.horizon = 1.0;
  trivial.steps = 32;
  const CheckReport flat = check_picard_decay(trivial, 3, 3, 10.0);
  CHECK(flat.pass);

  const RunConfig config = preset_config(256);
  const SolveProblem prob = build_problem(config);
  const std::vector<ExpansionVector> K{config.xi};
  const HypothesisReport hyp = verify_hypotheses(config.coefficients, config.family_f,
                                                 config.family_g, config.levy, K, {3.0}, 200, 5);
  const double c_tilde = 3.0 * hyp.lipschitz_global * (config.horizon + 8.0);
  const CheckReport rep = check_picard_decay(prob, 20, 17, c_tilde);
  CHECK(rep.pass);
  CHECK(rep.get("final_e_max") <= 1e-10);
  CHECK(rep.get("iterations_max") <= 20);
}

TEST_CASE("interlace check: inline agreement and jump replay") {
  const RunConfig config = preset_config(512, /*large_rate=*/2.0);
  const SolveProblem prob = build_problem(config);
  const CheckReport rep = check_interlace(prob, 10, 19);
  CHECK(rep.pass);
  CHECK(rep.get("jump_replay_gap_max") <= 1e-12);
  CHECK(rep.get("distance_over_budget_max") <= 1.0);
}

TEST_CASE("truncation check: inequalities, passthrough, Lipschitz budget") {
  const RunConfig config = preset_config(64);
  const SolveProblem prob = build_problem(config);
  const std::vector<ExpansionVector> K{config.xi};
  const double radius = 2.0;
  const HypothesisReport hyp = verify_hypotheses(config.coefficients, config.family_f,
                                                 config.family_g, config.levy, K, {radius}, 200, 5);
  const CheckReport rep =
      check_truncation(prob.evaluator, config.levy, radius, 2000, 23,
                       hyp.lipschitz_local.at(radius), hyp.alpha_k);
  CHECK(rep.pass);
  CHECK(rep.get("inequality_violations") == 0.0);
  CHECK(rep.get("passthrough_bit_exact") == 1.0);
  CHECK(rep.get("truncated_lipschitz") <= rep.get("budget"));
}

TEST_CASE("check reports reproduce bit-for-bit and serialize to json") {
  const CoefficientEvaluator zero = make_constant_drift_evaluator(vec1(0.0));
  LevyModel m;
  m.dim = 1;
  const CheckReport a = check_growth_bound(zero, m, 3.0, 100, 5);
  const CheckReport b = check_growth_bound(zero, m, 3.0, 100, 5);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json().find("\"id\": \"growth-bound\"") != std::string::npos);
  CHECK_THROWS_AS(a.get("missing"), std::out_of_range);
}
