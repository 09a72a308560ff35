#include "hsde/checks.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "hsde/inline_integrator.hpp"
#include "hsde/rng.hpp"

namespace hsde {

namespace {

Eigen::VectorXd ball_point(const CounterRng& rng, std::uint64_t idx, int dim, double radius) {
  Eigen::VectorXd v(dim);
  for (int a = 0; a < dim; ++a) v[a] = rng.normal(idx * 4 + static_cast<std::uint64_t>(a));
  const double n = v.norm();
  if (n < 1e-300) return Eigen::VectorXd::Zero(dim);
  const double u = rng.uniform(idx * 8 + 7);
  return v * (radius * std::pow(u, 1.0 / dim) / n);
}

double growth_quotient(const CoefficientEvaluator& ev, const LevyModel& model,
                       const Eigen::VectorXd& z) {
  double q = ev.drift(z).squaredNorm() + ev.diffusion(z).squaredNorm();
  for (const auto& a : model.small_atoms) q += ev.small_jump(z, a.mark).squaredNorm() * a.intensity;
  return q / (1.0 + z.squaredNorm());
}

double fit_growth_d(const CoefficientEvaluator& ev, const LevyModel& model, double radius,
                    int samples, std::uint64_t seed) {
  const CounterRng rng(seed, 0, 21);
  double d = 0.0;
  for (int s = 0; s < samples; ++s)
    d = std::max(d, growth_quotient(ev, model, ball_point(rng, static_cast<std::uint64_t>(s),
                                                          ev.dim, radius)));
  return d;
}

double factorial_envelope(double base, int k) {
  // base^{k+1} / (k+1)! computed in log space.
  return std::exp(static_cast<double>(k + 1) * std::log(base) - std::lgamma(static_cast<double>(k + 2)));
}

}  // namespace

double CheckReport::get(const std::string& key) const {
  for (const auto& [k, v] : scalars)
    if (k == key) return v;
  throw std::out_of_range("CheckReport: no scalar named " + key);
}

std::uint64_t digest_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

std::string CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["inputs_digest"] = inputs_digest;
  nlohmann::ordered_json s;
  for (const auto& [k, v] : scalars) s[k] = v;
  j["scalars"] = s;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["negative_control"] = negative_control;
  if (!note.empty()) j["note"] = note;
  return j.dump(2);
}

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += reports[i].to_json();
    if (i + 1 < reports.size()) out += ",";
    out += "\n";
  }
  out += "]\n";
  return out;
}

CheckReport check_growth_bound(const CoefficientEvaluator& ev, const LevyModel& model,
                               double radius, int samples, std::uint64_t seed,
                               double analytic_bound) {
  CheckReport rep;
  rep.id = "growth-bound";
  rep.inputs_digest = digest_bytes(ev.label + "/" + std::to_string(radius) + "/" +
                                   std::to_string(samples) + "/" + std::to_string(seed));
  const double d1 = fit_growth_d(ev, model, radius, samples, seed);
  const double d2 = fit_growth_d(ev, model, radius, 2 * samples, seed);
  const double dr = fit_growth_d(ev, model, 2.0 * radius, samples, seed + 1);
  rep.add("D", d2);
  rep.add("D_half_samples", d1);
  rep.add("D_double_radius", dr);
  rep.add("radius", radius);
  rep.tolerance = 0.2;
  const double scale = std::max(d2, 1e-300);
  const bool sample_stable = std::abs(d2 - d1) <= rep.tolerance * scale;
  const bool radius_stable = dr <= 1.5 * std::max(d2, 1e-12);
  bool under_analytic = true;
  if (analytic_bound > 0.0) {
    rep.add("analytic_bound", analytic_bound);
    under_analytic = d2 <= analytic_bound * (1.0 + 1e-9);
  }
  rep.pass = std::isfinite(d2) && sample_stable && radius_stable && under_analytic;
  if (!radius_stable) rep.note = "D grows with the sample radius: super-linear coefficients";
  return rep;
}

CheckReport check_uniqueness(const SolveProblem& prob, const std::vector<int>& m_list,
                             int replications, std::uint64_t seed, double tol_final,
                             bool mismatched_seeds) {
  if (prob.model.large_rate > 0.0)
    throw std::invalid_argument(
        "check_uniqueness: the Picard side solves the reduced equation; set large_rate = 0");
  CheckReport rep;
  rep.id = mismatched_seeds ? "uniqueness-adversarial" : "uniqueness";
  rep.negative_control = mismatched_seeds;
  rep.inputs_digest =
      digest_bytes(prob.evaluator.label + "/" + std::to_string(seed) + "/" +
                   std::to_string(replications) + "/" + std::to_string(m_list.size()));
  rep.tolerance = tol_final;

  std::vector<double> means;
  for (int m : m_list) {
    SolveProblem p = prob;
    p.steps = m;
    double acc = 0.0;
    for (int r = 0; r < replications; ++r) {
      const NoiseRealization n1 =
          sample_noise(p.model, p.horizon, m, seed, static_cast<std::uint64_t>(r));
      const NoiseRealization n2 =
          mismatched_seeds
              ? sample_noise(p.model, p.horizon, m, seed + 1, static_cast<std::uint64_t>(r))
              : n1;
      const auto [picard_path, trace] = picard_solve(p, n1);
      const PathRecord inline_path = inline_full_euler(p, n2);
      acc += picard_path.sup_distance(inline_path);
    }
    means.push_back(acc / replications);
    rep.add("mean_sup_distance_M" + std::to_string(m), means.back());
  }
  // Decreasing sequence; entries at the arithmetic floor may tie.
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i)
    monotone = monotone && (means[i] < means[i - 1] || means[i] <= 1e-14);
  rep.add("final_mean", means.back());
  rep.pass = monotone && means.back() <= tol_final;
  return rep;
}

CheckReport check_picard_decay(const SolveProblem& prob, int replications, std::uint64_t seed,
                               double c_tilde, int k_max, double tol) {
  CheckReport rep;
  rep.id = "picard-decay";
  rep.inputs_digest = digest_bytes(prob.evaluator.label + "/" + std::to_string(seed) + "/" +
                                   std::to_string(replications) + "/" + std::to_string(c_tilde));
  rep.tolerance = tol;

  std::vector<double> mean_e2;
  double worst_final = 0.0;
  int worst_iterations = 0;
  for (int r = 0; r < replications; ++r) {
    const NoiseRealization noise =
        sample_noise(prob.model, prob.horizon, prob.steps, seed, static_cast<std::uint64_t>(r));
    const auto [path, trace] = picard_solve(prob, noise, k_max, tol);
    if (mean_e2.size() < trace.sup_deltas.size()) mean_e2.resize(trace.sup_deltas.size(), 0.0);
    for (std::size_t k = 0; k < trace.sup_deltas.size(); ++k)
      mean_e2[k] += trace.sup_deltas[k] * trace.sup_deltas[k];
    worst_final = std::max(worst_final, trace.sup_deltas.back());
    worst_iterations = std::max(worst_iterations, trace.iterations);
    if (!trace.converged) {
      rep.note = "picard did not converge within k_max";
      rep.pass = false;
    }
  }
  for (auto& v : mean_e2) v /= replications;

  const double ct = c_tilde * prob.horizon;
  bool all_floor = true;
  for (double v : mean_e2) all_floor = all_floor && v <= 1e-28;
  bool envelope = all_floor;  // identically-zero iterations pass trivially
  double a_fit = 0.0;
  if (!all_floor && ct > 0.0 && mean_e2.size() >= 2) {
    envelope = true;
    a_fit = mean_e2[1] / factorial_envelope(ct, 1);
    // Below ~1e-28 the squared increments sit at the arithmetic floor of the
    // fixed point; the factorial envelope keeps shrinking past it.
    for (std::size_t k = 1; k < mean_e2.size(); ++k) {
      if (mean_e2[k] <= 1e-28) break;
      if (mean_e2[k] > a_fit * factorial_envelope(ct, static_cast<int>(k)) * (1.0 + 1e-9)) {
        envelope = false;
        rep.note = "envelope violated at k=" + std::to_string(k);
        break;
      }
    }
  }
  rep.add("c_tilde", c_tilde);
  rep.add("A", a_fit);
  rep.add("iterations_max", worst_iterations);
  rep.add("final_e_max", worst_final);
  for (std::size_t k = 0; k < mean_e2.size() && k < 24; ++k)
    rep.add("mean_e2_k" + std::to_string(k), mean_e2[k]);
  rep.pass = envelope && worst_final <= tol && rep.note.empty();
  return rep;
}

CheckReport check_interlace(const SolveProblem& prob, int replications, std::uint64_t seed) {
  CheckReport rep;
  rep.id = "interlace";
  rep.inputs_digest = digest_bytes(prob.evaluator.label + "/" + std::to_string(seed) + "/" +
                                   std::to_string(replications));
  const double dt = prob.horizon / prob.steps;

  double worst_ratio = 0.0;        // sup-distance over its own 5 dt L budget
  double worst_jump_gap = 0.0;     // jump application replay disagreement
  double worst_distance = 0.0;
  bool pass = true;
  for (int r = 0; r < replications; ++r) {
    const NoiseRealization noise =
        sample_noise(prob.model, prob.horizon, prob.steps, seed, static_cast<std::uint64_t>(r));
    const PathRecord a = interlace_solve(prob, noise);
    const PathRecord b = inline_full_euler(prob, noise);
    const double dist = a.sup_distance(b);

    double lip = 0.0;
    for (std::size_t i = 1; i < b.times.size(); ++i) {
      const double gap = b.times[i] - b.times[i - 1];
      if (gap <= 0.0) continue;
      lip = std::max(lip, (b.states.row(static_cast<Eigen::Index>(i)) -
                           b.states.row(static_cast<Eigen::Index>(i - 1)))
                              .norm() /
                              dt);
    }
    const double budget = 5.0 * dt * std::max(lip, 1e-12);
    worst_distance = std::max(worst_distance, dist);
    worst_ratio = std::max(worst_ratio, dist / budget);
    if (dist > budget) pass = false;

    // Replaying the interlacing jump application on the inline integrator's
    // pre-jump states must reproduce its post-jump states.
    for (const auto& app : b.large_jumps) {
      const Eigen::VectorXd replay = apply_large_jump(prob.evaluator, app.pre_state, app.mark);
      worst_jump_gap = std::max(worst_jump_gap, (replay - app.post_state).norm());
    }
  }
  rep.add("sup_distance_max", worst_distance);
  rep.add("distance_over_budget_max", worst_ratio);
  rep.add("jump_replay_gap_max", worst_jump_gap);
  rep.tolerance = 1e-12;
  rep.pass = pass && worst_jump_gap <= 1e-12;
  return rep;
}

CheckReport check_truncation(const CoefficientEvaluator& ev, const LevyModel& model, double radius,
                             int samples, std::uint64_t seed, double c_k_r, double alpha_k) {
  CheckReport rep;
  rep.id = "truncation";
  rep.inputs_digest = digest_bytes(ev.label + "/" + std::to_string(radius) + "/" +
                                   std::to_string(samples) + "/" + std::to_string(seed));
  const CounterRng rng(seed, 0, 31);
  const int d = ev.dim;
  const double r = radius;

  long violations = 0;
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t base = static_cast<std::uint64_t>(s) * 16;
    Eigen::VectorXd z1 = ball_point(rng, base, d, r);
    Eigen::VectorXd dir(d);
    for (int a = 0; a < d; ++a)
      dir[a] = rng.normal(base * 4 + 64 + static_cast<std::uint64_t>(a));
    if (dir.norm() < 1e-300) dir.setOnes();
    dir /= dir.norm();
    const double rho = r * (1.0 + rng.uniform(base + 9));  // |z2| uniform in [R, 2R]
    const Eigen::VectorXd z2 = rho * dir;

    const double rhs = (z1 - z2).squaredNorm();
    const double lhs1 = (z1 - (r / z2.norm()) * z2).squaredNorm();
    const double lhs2 = (z2.norm() - r) * (z2.norm() - r);
    if (lhs1 > rhs || lhs2 > rhs) ++violations;
  }
  rep.add("inequality_violations", static_cast<double>(violations));

  // Bit-exact passthrough inside the radius.
  const CoefficientEvaluator trunc = truncate_coeffs(ev, r);
  bool passthrough = true;
  for (int s = 0; s < 64; ++s) {
    const Eigen::VectorXd z = ball_point(rng, 4096 + static_cast<std::uint64_t>(s), d, r);
    const Eigen::VectorXd a = ev.drift(z), b = trunc.drift(z);
    for (int c = 0; c < d; ++c)
      if (a[c] != b[c]) passthrough = false;
  }
  rep.add("passthrough_bit_exact", passthrough ? 1.0 : 0.0);

  // Empirical nu-integrated Lipschitz constant of the truncated small-jump
  // lift against the proof-side budget.
  double worst = 0.0;
  if (!model.small_atoms.empty()) {
    for (int s = 0; s < samples / 10 + 1; ++s) {
      const std::uint64_t base = 1u << 20;
      const Eigen::VectorXd z1 =
          ball_point(rng, base + 2 * static_cast<std::uint64_t>(s), d, 3.0 * r);
      const Eigen::VectorXd z2 =
          ball_point(rng, base + 2 * static_cast<std::uint64_t>(s) + 1, d, 3.0 * r);
      const double dz2 = (z1 - z2).squaredNorm();
      if (dz2 < 1e-20) continue;
      double q = 0.0;
      for (const auto& a : model.small_atoms)
        q += (trunc.small_jump(z1, a.mark) - trunc.small_jump(z2, a.mark)).squaredNorm() *
             a.intensity;
      worst = std::max(worst, q / dz2);
    }
  }
  const double budget = 6.0 * c_k_r + 4.0 * alpha_k / (r * r);
  rep.add("truncated_lipschitz", worst);
  rep.add("budget", budget);
  rep.tolerance = 0.0;
  rep.pass = violations == 0 && passthrough && worst <= budget * (1.0 + 1e-9);
  return rep;
}

}  // namespace hsde
