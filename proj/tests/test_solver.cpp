#include <doctest.h>

#include "hsde/inline_integrator.hpp"
#include "test_support.hpp"

using namespace hsde;
using hsde_test::preset_config;
using hsde_test::vec1;

namespace {

NoiseRealization quiet_noise(int dim, double horizon, int steps) {
  LevyModel m;
  m.dim = dim;
  NoiseRealization n = sample_noise(m, horizon, steps, 1, 0);
  n.brownian.setZero();
  return n;
}

}  // namespace

TEST_CASE("zero coefficients hold the initial point") {
  SolveProblem prob;
  prob.evaluator = make_constant_drift_evaluator(vec1(0.0));
  prob.model.dim = 1;
  prob.kappa = vec1(0.4);
  prob.horizon = 1.0;
  prob.steps = 32;
  const NoiseRealization noise = sample_noise(prob.model, 1.0, 32, 5, 0);
  const PathRecord path = solve_reduced_euler(prob, noise);
  REQUIRE(path.times.size() == 33);
  for (Eigen::Index i = 0; i < path.states.rows(); ++i) CHECK(path.states(i, 0) == 0.4);
}

TEST_CASE("constant drift integrates to kappa + c t on the grid") {
  SolveProblem prob;
  prob.evaluator = make_constant_drift_evaluator(vec1(0.7));
  prob.model.dim = 1;
  prob.kappa = vec1(-0.2);
  prob.horizon = 2.0;
  prob.steps = 64;
  const PathRecord path = solve_reduced_euler(prob, quiet_noise(1, 2.0, 64));
  for (std::size_t i = 0; i < path.times.size(); ++i)
    CHECK(std::abs(path.states(static_cast<Eigen::Index>(i), 0) - (-0.2 + 0.7 * path.times[i])) <=
          1e-12);
}

TEST_CASE("noise-free lifted drift converges to the ODE oracle at first order") {
  double prev_err = 0.0;
  for (int steps : {512, 1024}) {
    RunConfig config = preset_config(steps, 0.0, 16, /*sigma_scale=*/0.0);
    config.levy.small_atoms.clear();  // pure drift
    const SolveProblem prob = build_problem(config);
    const PathRecord path = solve_reduced_euler(prob, quiet_noise(1, 1.0, steps));
    const Eigen::VectorXd want = hsde_test::rk45_solve(prob.evaluator.drift, config.kappa, 1.0);
    const double err =
        std::abs(path.states(path.states.rows() - 1, 0) - want[0]);
    CHECK(err <= 1.0 / steps);
    if (prev_err > 0.0) {
      const double ratio = err / prev_err;
      CHECK(ratio >= 0.3);
      CHECK(ratio <= 0.7);
    }
    prev_err = err;
  }
}

TEST_CASE("picard: trivial problems converge immediately") {
  SolveProblem prob;
  prob.evaluator = make_constant_drift_evaluator(vec1(0.0));
  prob.model.dim = 1;
  prob.kappa = vec1(1.0);
  prob.horizon = 1.0;
  prob.steps = 16;
  const NoiseRealization noise = quiet_noise(1, 1.0, 16);
  {
    const auto [path, trace] = picard_solve(prob, noise);
    CHECK(trace.converged);
    CHECK(trace.iterations == 1);
    CHECK(trace.sup_deltas[0] == 0.0);
  }
  {
    prob.evaluator = make_constant_drift_evaluator(vec1(0.5));
    const auto [path, trace] = picard_solve(prob, noise);
    CHECK(trace.converged);
    // One substitution lands on the exact path; the next confirms it.
    REQUIRE(trace.iterations == 2);
    CHECK(trace.sup_deltas[1] == 0.0);
    CHECK(std::abs(path.states(16, 0) - 1.5) <= 1e-12);
  }
}

TEST_CASE("picard fixed point coincides with the explicit Euler path") {
  const RunConfig config = preset_config(256);
  const SolveProblem prob = build_problem(config);
  const NoiseRealization noise = sample_noise(config.levy, 1.0, 256, 11, 0);
  const auto [ppath, trace] = picard_solve(prob, noise, 50, 1e-10);
  CHECK(trace.converged);
  CHECK(trace.iterations <= 20);
  CHECK(trace.sup_deltas.back() <= 1e-10);
  const PathRecord epath = solve_reduced_euler(prob, noise);
  CHECK(ppath.sup_distance(epath) <= 1e-10);

  // Super-geometric tail: each contraction factor eventually beats the last.
  const auto& e = trace.sup_deltas;
  REQUIRE(e.size() >= 4);
  for (std::size_t k = 1; k + 2 < e.size(); ++k) {
    if (e[k + 2] <= 0.0 || e[k] <= 0.0) break;
    CHECK(e[k + 2] / e[k + 1] <= e[k + 1] / e[k] * 1.5);
  }
}

TEST_CASE("interlacing with no large events is bit-identical to the reduced solver") {
  const RunConfig config = preset_config(128);
  const SolveProblem prob = build_problem(config);
  const NoiseRealization noise = sample_noise(config.levy, 1.0, 128, 13, 2);
  REQUIRE(noise.large_events.empty());
  const PathRecord a = solve_reduced_euler(prob, noise);
  const PathRecord b = interlace_solve(prob, noise);
  CHECK(a.bit_identical(b));
}

TEST_CASE("state-independent large jumps shift the path additively") {
  SolveProblem prob;
  prob.evaluator = make_constant_drift_evaluator(vec1(0.0));
  LargeJumpFamily ident;
  ident.kind = LargeJumpFamily::Kind::kIdentity;
  prob.evaluator.large_jump = [ident](const Eigen::VectorXd& z, const Eigen::VectorXd& x) {
    (void)z;
    return ident.evaluate(ExpansionVector(1, 0, 0.0), x);
  };
  prob.model.dim = 1;
  prob.kappa = vec1(0.0);
  prob.horizon = 1.0;
  prob.steps = 16;
  NoiseRealization noise = quiet_noise(1, 1.0, 16);
  noise.large_events = {{0.37, vec1(1.5)}};
  const PathRecord path = interlace_solve(prob, noise);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double want = path.times[i] >= 0.37 ? 1.5 : 0.0;
    CHECK(path.states(static_cast<Eigen::Index>(i), 0) == want);
  }
  REQUIRE(path.large_jumps.size() == 1);
  CHECK(path.large_jumps[0].time == 0.37);
  // rcll: the recorded row at the jump time is the post-jump value.
  const auto it = std::find(path.times.begin(), path.times.end(), 0.37);
  REQUIRE(it != path.times.end());
  CHECK(path.is_large_jump[static_cast<std::size_t>(it - path.times.begin())] == 1);
}

TEST_CASE("interlacing tracks the inline oracle at grid accuracy") {
  double prev = 0.0;
  for (int steps : {256, 1024}) {
    const RunConfig config = preset_config(steps, /*large_rate=*/2.0);
    const SolveProblem prob = build_problem(config);
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 5; ++r) {
      const NoiseRealization noise = sample_noise(config.levy, 1.0, steps, 17, r);
      worst = std::max(worst, interlace_solve(prob, noise).sup_distance(
                                  inline_full_euler(prob, noise)));
    }
    if (prev > 0.0) CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev <= 5e-2);
}

TEST_CASE("radial truncation: passthrough bits, scaling band, zero band") {
  const CoefficientEvaluator cubic = make_cubic_drift_evaluator(1, 1.0);
  const double radius = 2.0;
  const CoefficientEvaluator trunc = truncate_coeffs(cubic, radius);
  CHECK(trunc.synthetic);

  CHECK(trunc.drift(vec1(1.3))[0] == cubic.drift(vec1(1.3))[0]);
  CHECK(trunc.drift(vec1(-2.0))[0] == cubic.drift(vec1(-2.0))[0]);
  CHECK(trunc.drift(vec1(4.0))[0] == 0.0);
  CHECK(trunc.drift(vec1(5.7))[0] == 0.0);
  // |z| = 1.5 R: factor (2R - |z|)/R = 1/2 on the boundary value.
  CHECK(trunc.drift(vec1(3.0))[0] == 0.5 * cubic.drift(vec1(2.0))[0]);

  CHECK_THROWS_AS(truncate_coeffs(cubic, 0.0), std::invalid_argument);
}

TEST_CASE("solve_local recovers the closed-form blow-up of the cubic drift") {
  SolveProblem prob;
  prob.evaluator = make_cubic_drift_evaluator(1, 1.0);
  prob.model.dim = 1;
  prob.kappa = vec1(1.0);
  prob.horizon = 1.0;
  prob.steps = 4096;
  const NoiseRealization noise = quiet_noise(1, 1.0, 4096);
  const std::vector<double> levels{2, 4, 8, 16, 32};
  const PathRecord path = solve_local(prob, noise, levels);
  REQUIRE(path.explosion.has_value());
  const ExplosionInfo& info = *path.explosion;

  // z(t) = (1 - 2t)^{-1/2}: theta_m = (1 - m^{-2})/2, eta = 1/2.
  for (std::size_t i = 1; i < info.theta.size(); ++i) CHECK(info.theta[i] > info.theta[i - 1]);
  CHECK(info.exploded);
  const double dt = 1.0 / 4096;
  CHECK(std::abs(info.eta_estimate - 0.5) <= 2.0 * dt);

  // States at and beyond the estimated explosion time are at infinity.
  bool saw_inf = false;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    if (path.times[i] >= info.eta_estimate) {
      CHECK(std::isinf(path.states(static_cast<Eigen::Index>(i), 0)));
      saw_inf = true;
    } else {
      CHECK(std::isfinite(path.states(static_cast<Eigen::Index>(i), 0)));
    }
  }
  CHECK(saw_inf);
  CHECK_FALSE(path.overflow);
}

TEST_CASE("solve_local: bounded lifted coefficients never explode") {
  const RunConfig config = preset_config(512);
  const SolveProblem prob = build_problem(config);
  const NoiseRealization noise = sample_noise(config.levy, 1.0, 512, 19, 0);
  const PathRecord path = solve_local(prob, noise, {2, 4, 8});
  REQUIRE(path.explosion.has_value());
  CHECK_FALSE(path.explosion->exploded);
  CHECK(path.states.allFinite());
}

TEST_CASE("solve_local with one huge radius reduces to the interlaced path") {
  const RunConfig config = preset_config(128, 2.0);
  const SolveProblem prob = build_problem(config);
  const NoiseRealization noise = sample_noise(config.levy, 1.0, 128, 23, 1);
  const PathRecord direct = interlace_solve(prob, noise);
  const PathRecord local = solve_local(prob, noise, {1e6});
  CHECK(local.times == direct.times);
  for (Eigen::Index i = 0; i < direct.states.size(); ++i)
    CHECK(local.states(i) == direct.states(i));
  CHECK_FALSE(local.explosion->exploded);
}

TEST_CASE("untruncated super-linear growth is flagged as numerical overflow") {
  SolveProblem prob;
  prob.evaluator = make_cubic_drift_evaluator(1, 1.0);
  prob.model.dim = 1;
  prob.kappa = vec1(1.0);
  prob.horizon = 1.0;
  prob.steps = 4096;
  const PathRecord path = solve_reduced_euler(prob, quiet_noise(1, 1.0, 4096));
  CHECK(path.overflow);
  CHECK(path.overflow_time > 0.4);
  CHECK_FALSE(path.explosion.has_value());
}

TEST_CASE("localization fixes points below the threshold and zeroes the rest") {
  const ExpansionVector xi = delta0_expansion(1, 16, -1.0);
  const double norm = norm_p(xi, -1.0);
  const ExpansionVector kept = localize_xi(xi, norm + 1.0);
  CHECK(kept.coeffs == xi.coeffs);
  const ExpansionVector zeroed = localize_xi(xi, norm * 0.5);
  CHECK(zeroed.coeffs.cwiseAbs().maxCoeff() == 0.0);

  CHECK(localize_kappa(vec1(3.0), 5.0) == vec1(3.0));
  CHECK(localize_kappa(vec1(3.0), 2.0) == vec1(0.0));
  CHECK(localize_kappa(vec1(2.0), 2.0) == vec1(2.0));  // boundary is kept

  // Solving with the localized parameter is byte-identical when it is a
  // no-op: the object is the same, so the artifacts must be too.
  const RunConfig config = preset_config(64);
  RunConfig localized = config;
  localized.xi = localize_xi(config.xi, norm_p(config.xi, config.xi.regularity) + 1.0);
  localized.kappa = localize_kappa(config.kappa, 1.0);
  const NoiseRealization noise = sample_noise(config.levy, 1.0, 64, 29, 0);
  const PathRecord a = solve_reduced_euler(build_problem(config), noise);
  const PathRecord b = solve_reduced_euler(build_problem(localized), noise);
  CHECK(a.bit_identical(b));
  CHECK(path_to_csv(a) == path_to_csv(b));
}

TEST_CASE("path CSV carries the rcll flags and the infinity encoding") {
  PathRecord rec;
  rec.times = {0.0, 0.5, 1.0};
  rec.states.resize(3, 1);
  rec.states << 1.0, 2.5, std::numeric_limits<double>::infinity();
  rec.is_large_jump = {0, 1, 0};
  const std::string csv = path_to_csv(rec);
  CHECK(csv.find("t,U_1,is_large_jump\n") == 0);
  CHECK(csv.find("0.5,2.5,1") != std::string::npos);
  CHECK(csv.find("1,inf,0") != std::string::npos);
}

TEST_CASE("problem and noise must agree on the grid") {
  const RunConfig config = preset_config(64);
  const SolveProblem prob = build_problem(config);
  const NoiseRealization wrong = sample_noise(config.levy, 1.0, 32, 1, 0);
  CHECK_THROWS_AS(solve_reduced_euler(prob, wrong), std::invalid_argument);
}
