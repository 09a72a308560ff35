#include "hsde/hypotheses.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hsde/rng.hpp"

namespace hsde {

namespace {

Eigen::VectorXd ball_point(const CounterRng& rng, std::uint64_t idx, int dim, double radius) {
  // Rejection-free: gaussian direction scaled by u^{1/d} radius.
  Eigen::VectorXd v(dim);
  for (int a = 0; a < dim; ++a)
    v[a] = rng.normal(idx * 4 + static_cast<std::uint64_t>(a));
  const double n = v.norm();
  if (n < 1e-300) return Eigen::VectorXd::Zero(dim);
  const double u = rng.uniform(idx * 8 + 7);
  return v * (radius * std::pow(u, 1.0 / dim) / n);
}

}  // namespace

HypothesisReport verify_hypotheses(const DistributionCoefficientSet& coeffs,
                                   const std::optional<SmallJumpFamily>& fam_f,
                                   const std::optional<LargeJumpFamily>& fam_g,
                                   const LevyModel& model, const std::vector<ExpansionVector>& K,
                                   const std::vector<double>& radii, int pair_samples,
                                   std::uint64_t seed) {
  coeffs.validate();
  model.validate();
  if (K.empty()) throw std::invalid_argument("verify_hypotheses: K must be non-empty");

  HypothesisReport rep;
  rep.pair_samples = pair_samples;
  rep.sample_seed = seed;
  rep.beta = coeffs.beta;
  rep.beta_min = coeffs.min_beta();
  rep.sigma_b_ok = coeffs.beta + 1e-12 >= rep.beta_min;

  const ExpansionVector zero = zero_expansion(coeffs.dim, coeffs.cutoff, -coeffs.regularity);

  if (fam_f) {
    for (const auto& a : model.small_atoms) {
      const double cx = fam_f->lipschitz_profile(a.mark);
      rep.sup_cx_atoms = std::max(rep.sup_cx_atoms, cx);
      rep.integral_cx2 += cx * cx * a.intensity;
      const double f0 = fam_f->evaluate(zero, a.mark).norm();
      rep.sup_f0 = std::max(rep.sup_f0, f0);
      rep.integral_f02 += f0 * f0 * a.intensity;
      rep.integral_f04 += f0 * f0 * f0 * f0 * a.intensity;
    }
    // Declared profile is |x|-homogeneous, so its sup over the annulus is
    // the |x| -> 1 limit.
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(coeffs.dim);
    unit[0] = 1.0;
    rep.sup_cx_family = fam_f->lipschitz_profile(unit);
    rep.f2_ok = std::isfinite(rep.sup_cx_family) && std::isfinite(rep.integral_cx2);
    rep.f3_ok = std::isfinite(rep.sup_f0) && std::isfinite(rep.integral_f02);

    // F1 with the declared profile, sampled over random parameter pairs.
    const CounterRng rng(seed, 0, 11);
    rep.f1_ok = true;
    const int n = K.front().basis->size();
    for (int s = 0; s < pair_samples && rep.f1_ok; ++s) {
      ExpansionVector y1 = zero, y2 = zero;
      for (int i = 0; i < n; ++i) {
        y1.coeffs[i] = rng.normal(static_cast<std::uint64_t>(s) * 4 * static_cast<std::uint64_t>(n) +
                                  static_cast<std::uint64_t>(i));
        y2.coeffs[i] = rng.normal(static_cast<std::uint64_t>(s) * 4 * static_cast<std::uint64_t>(n) +
                                  static_cast<std::uint64_t>(n + i));
      }
      ExpansionVector diff = y1;
      diff.coeffs -= y2.coeffs;
      const double gap = norm_p(diff, -coeffs.regularity - 0.5);
      for (const auto& a : model.small_atoms) {
        const double lhs = (fam_f->evaluate(y1, a.mark) - fam_f->evaluate(y2, a.mark)).norm();
        if (lhs > fam_f->lipschitz_profile(a.mark) * gap * (1.0 + 1e-9)) rep.f1_ok = false;
      }
    }
  } else {
    rep.f1_ok = rep.f2_ok = rep.f3_ok = true;
  }

  // alpha(K) and the fourth moment over K.
  const QuadratureRule rule = default_rule(coeffs.cutoff, radii.empty() ? 4.0 : radii.back());
  if (fam_f) {
    for (const auto& y : K) {
      double a2 = 0.0;
      for (const auto& a : model.small_atoms) {
        const double f = fam_f->evaluate(y, a.mark).norm();
        a2 += f * f * a.intensity;
      }
      rep.alpha_k = std::max(rep.alpha_k, a2);
    }
  }

  // Empirical Lipschitz constants of the lifted coefficients in z.
  for (double radius : radii) {
    const CounterRng rng(seed, static_cast<std::uint64_t>(radius * 8192) + 17, 12);
    double worst = 0.0;
    for (const auto& y : K) {
      for (int s = 0; s < pair_samples; ++s) {
        const Eigen::VectorXd z1 = ball_point(rng, 2 * static_cast<std::uint64_t>(s), coeffs.dim, radius);
        const Eigen::VectorXd z2 =
            ball_point(rng, 2 * static_cast<std::uint64_t>(s) + 1, coeffs.dim, radius);
        const double dz = (z1 - z2).norm();
        if (dz < 1e-12) continue;
        const Eigen::VectorXd db =
            lift_drift(coeffs, z1, y, rule) - lift_drift(coeffs, z2, y, rule);
        const Eigen::MatrixXd ds =
            lift_diffusion(coeffs, z1, y, rule) - lift_diffusion(coeffs, z2, y, rule);
        double q = db.squaredNorm() + ds.squaredNorm();
        if (fam_f) {
          const ExpansionVector ty1 = translate(y, z1, rule);
          const ExpansionVector ty2 = translate(y, z2, rule);
          for (const auto& a : model.small_atoms)
            q += (fam_f->evaluate(ty1, a.mark) - fam_f->evaluate(ty2, a.mark)).squaredNorm() *
                 a.intensity;
        }
        worst = std::max(worst, q / (dz * dz));
      }
    }
    rep.lipschitz_local[radius] = worst;
    rep.lipschitz_global = std::max(rep.lipschitz_global, worst);
  }

  // G1 probe: the z-continuity profile of the lifted large-jump map must
  // decrease as the increment shrinks.
  if (fam_g) {
    Eigen::VectorXd mark = Eigen::VectorXd::Zero(coeffs.dim);
    mark[0] = 1.5;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(coeffs.dim);
    z[0] = 0.7;
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    double first = 0.0, last = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      Eigen::VectorXd zd = z;
      zd[0] += delta;
      const double gap = (fam_g->evaluate(translate(K.front(), zd, rule), mark) -
                          fam_g->evaluate(translate(K.front(), z, rule), mark))
                             .norm();
      if (delta == 1e-1) first = gap;
      last = gap;
      if (gap > prev) decreasing = false;
      prev = gap;
    }
    rep.g1_continuity_drop = first > 0.0 ? last / first : 0.0;
    rep.g1_ok = decreasing;
  } else {
    rep.g1_ok = true;
  }

  rep.pass = rep.sigma_b_ok && rep.f1_ok && rep.f2_ok && rep.f3_ok && rep.g1_ok &&
             std::isfinite(rep.alpha_k) && std::isfinite(rep.lipschitz_global);
  return rep;
}

std::string HypothesisReport::to_text() const {
  std::ostringstream os;
  char buf[64];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << key << " = " << buf << "\n";
  };
  os << "hypothesis-report\n";
  line("beta", beta);
  line("beta_min", beta_min);
  line("sup_cx_atoms", sup_cx_atoms);
  line("sup_cx_family", sup_cx_family);
  line("integral_cx2", integral_cx2);
  line("sup_f0", sup_f0);
  line("integral_f02", integral_f02);
  line("integral_f04", integral_f04);
  line("alpha_k", alpha_k);
  line("lipschitz_global", lipschitz_global);
  for (const auto& [r, c] : lipschitz_local) {
    std::snprintf(buf, sizeof(buf), "lipschitz_local[%g]", r);
    line(buf, c);
  }
  line("g1_continuity_drop", g1_continuity_drop);
  os << "sigma_b_ok = " << (sigma_b_ok ? "true" : "false") << "\n";
  os << "f1_ok = " << (f1_ok ? "true" : "false") << "\n";
  os << "f2_ok = " << (f2_ok ? "true" : "false") << "\n";
  os << "f3_ok = " << (f3_ok ? "true" : "false") << "\n";
  os << "g1_ok = " << (g1_ok ? "true" : "false") << "\n";
  os << "pass = " << (pass ? "true" : "false") << "\n";
  os << "pair_samples = " << pair_samples << "\n";
  os << "sample_seed = " << sample_seed << "\n";
  return os.str();
}

}  // namespace hsde
