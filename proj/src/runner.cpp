#include "hsde/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hsde/checks.hpp"
#include "hsde/parallel.hpp"

namespace hsde {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << bytes;
}

struct RepResult {
  PathRecord path;
  std::optional<PicardTrace> trace;
};

RepResult solve_one(const RunConfig& config, const SolveProblem& prob,
                    const NoiseRealization& noise) {
  RepResult out;
  switch (config.solver) {
    case SolverKind::kEuler:
      out.path = solve_reduced_euler(prob, noise);
      break;
    case SolverKind::kPicard: {
      auto [p, t] = picard_solve(prob, noise, config.k_max, config.tol);
      out.path = std::move(p);
      out.trace = std::move(t);
      break;
    }
    case SolverKind::kInterlace:
      out.path = interlace_solve(prob, noise);
      break;
    case SolverKind::kLocal:
      out.path = solve_local(prob, noise, config.m_levels);
      break;
  }
  return out;
}

nlohmann::ordered_json rep_summary(const RepResult& r) {
  nlohmann::ordered_json j;
  j["rows"] = r.path.times.size();
  j["overflow"] = r.path.overflow;
  if (r.path.overflow) j["overflow_time"] = r.path.overflow_time;
  if (r.path.explosion) {
    const auto& e = *r.path.explosion;
    j["levels"] = e.levels;
    nlohmann::ordered_json theta = nlohmann::ordered_json::array();
    for (double t : e.theta)
      theta.push_back(std::isfinite(t) ? nlohmann::ordered_json(t) : nlohmann::ordered_json(nullptr));
    j["theta"] = theta;
    j["eta_theta_max"] =
        std::isfinite(e.eta_theta_max) ? nlohmann::ordered_json(e.eta_theta_max) : nullptr;
    j["eta_estimate"] =
        std::isfinite(e.eta_estimate) ? nlohmann::ordered_json(e.eta_estimate) : nullptr;
    j["exploded"] = e.exploded;
  }
  if (r.trace) {
    nlohmann::ordered_json t;
    t["iterations"] = r.trace->iterations;
    t["converged"] = r.trace->converged;
    t["sup_deltas"] = r.trace->sup_deltas;
    t["fitted_contraction"] = r.trace->fitted_contraction;
    j["picard"] = t;
  }
  return j;
}

}  // namespace

int run_simulate(const RunConfig& config, const std::string& out_dir) {
  const SolveProblem prob = build_problem(config);
  fs::create_directories(out_dir);

  std::vector<RepResult> results(static_cast<std::size_t>(config.replications));
  parallel_for_index(config.replications, config.threads, [&](int r) {
    const NoiseRealization noise = sample_noise(config.levy, config.horizon, config.steps,
                                                config.seed, static_cast<std::uint64_t>(r));
    results[static_cast<std::size_t>(r)] = solve_one(config, prob, noise);
  });

  // Single-writer output keeps ordering and bytes deterministic.
  nlohmann::ordered_json summary;
  summary["seed"] = config.seed;
  summary["replications"] = config.replications;
  summary["solver"] = static_cast<int>(config.solver);
  summary["config"] = config.source_text;
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (int r = 0; r < config.replications; ++r) {
    char name[48];
    std::snprintf(name, sizeof(name), "rep_%04d_path.csv", r);
    write_file(fs::path(out_dir) / name, path_to_csv(results[static_cast<std::size_t>(r)].path));
    reps.push_back(rep_summary(results[static_cast<std::size_t>(r)]));
  }
  summary["replication_results"] = reps;
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int run_verify(const RunConfig& config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const SolveProblem prob = build_problem(config);

  std::optional<HypothesisReport> hyp;
  const bool lifted = config.coefficient_type == "lifted";
  const bool wants_hyp_constants = [&] {
    for (const auto& c : config.checks)
      if (c == "hypotheses" || c == "picard_decay" || c == "truncation" || c == "growth")
        return true;
    return false;
  }();
  if (lifted && wants_hyp_constants) {
    const std::vector<ExpansionVector> K{config.xi};
    const std::vector<double> radii{1.0, config.check_radius, config.truncation_radius};
    hyp = verify_hypotheses(config.coefficients, config.family_f, config.family_g, config.levy, K,
                            radii, config.check_samples, config.seed);
    write_file(fs::path(out_dir) / "hypothesis_report.txt", hyp->to_text());
  }

  std::vector<CheckReport> reports;
  for (const auto& name : config.checks) {
    if (name == "hypotheses") {
      if (!hyp) throw std::invalid_argument("checks: hypotheses requires lifted coefficients");
      CheckReport r;
      r.id = "hypotheses";
      r.inputs_digest = digest_bytes(config.source_text);
      r.add("alpha_k", hyp->alpha_k);
      r.add("lipschitz_global", hyp->lipschitz_global);
      r.add("integral_cx2", hyp->integral_cx2);
      r.pass = hyp->pass;
      reports.push_back(std::move(r));
    } else if (name == "growth") {
      double analytic = 0.0;
      if (hyp) {
        const double xin = norm_p(config.xi, config.xi.regularity);
        const double beta = config.coefficients.beta;
        const int d = config.dimension;
        double q0 = beta * beta * d * xin * xin + beta * beta * d * d * xin * xin;
        if (config.family_f)
          for (const auto& a : config.levy.small_atoms) {
            const double cx = config.family_f->lipschitz_profile(a.mark);
            const double f0 = config.family_f->evaluate(
                zero_expansion(d, config.cutoff, config.xi.regularity), a.mark).norm();
            q0 += (cx * xin + f0) * (cx * xin + f0) * a.intensity;
          }
        analytic = 2.0 * std::max(hyp->lipschitz_global, q0);
      }
      reports.push_back(check_growth_bound(prob.evaluator, config.levy, config.check_radius,
                                           config.check_samples, config.seed, analytic));
    } else if (name == "uniqueness") {
      reports.push_back(check_uniqueness(prob, config.check_m_list, config.check_replications,
                                         config.seed, 1e-3));
      reports.push_back(check_uniqueness(prob, config.check_m_list,
                                         std::min(config.check_replications, 5), config.seed,
                                         1e-3, /*mismatched_seeds=*/true));
    } else if (name == "picard_decay") {
      const double ck = hyp ? hyp->lipschitz_global : 1.0;
      const double c_tilde = 3.0 * ck * (config.horizon + 8.0);
      reports.push_back(check_picard_decay(prob, config.check_replications, config.seed, c_tilde,
                                           config.k_max, config.tol));
    } else if (name == "interlace") {
      reports.push_back(check_interlace(prob, config.check_replications, config.seed));
    } else if (name == "truncation") {
      const double ckr = hyp ? hyp->lipschitz_local.at(config.truncation_radius) : 0.0;
      const double alpha = hyp ? hyp->alpha_k : 0.0;
      reports.push_back(check_truncation(prob.evaluator, config.levy, config.truncation_radius,
                                         config.check_samples, config.seed, ckr, alpha));
    }
  }

  write_file(fs::path(out_dir) / "checks.json", reports_to_json(reports));
  int failures = 0;
  for (const auto& r : reports) {
    const bool effective_pass = r.negative_control ? !r.pass : r.pass;
    std::cout << (effective_pass ? "PASS" : "FAIL") << "  " << r.id
              << (r.negative_control ? " (negative control)" : "") << "\n";
    if (!effective_pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace hsde
