#include "hsde/coefficients.hpp"

#include <sstream>

namespace hsde {

void DistributionCoefficientSet::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("coefficient set: dim must be in [1,3]");
  if (regularity <= 0) throw std::invalid_argument("coefficient set: regularity p must be > 0");
  if (sigma.size() != static_cast<std::size_t>(dim * dim) ||
      b.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("coefficient set: sigma must be d x d and b length d");
  for (const auto& e : sigma)
    if (e.dim != dim || e.cutoff != cutoff)
      throw std::invalid_argument("coefficient set: sigma entry shape mismatch");
  for (const auto& e : b)
    if (e.dim != dim || e.cutoff != cutoff)
      throw std::invalid_argument("coefficient set: b entry shape mismatch");
  if (beta + 1e-12 < min_beta())
    throw std::invalid_argument("coefficient set: beta is below max entry norm");
}

double DistributionCoefficientSet::min_beta() const {
  double m = 0.0;
  for (const auto& e : sigma) m = std::max(m, norm_p(e, regularity));
  for (const auto& e : b) m = std::max(m, norm_p(e, regularity));
  return m;
}

DistributionCoefficientSet make_coefficient_set(int dim, int cutoff, double regularity) {
  DistributionCoefficientSet c;
  c.dim = dim;
  c.cutoff = cutoff;
  c.regularity = regularity;
  c.sigma.assign(static_cast<std::size_t>(dim * dim), zero_expansion(dim, cutoff, regularity));
  c.b.assign(static_cast<std::size_t>(dim), zero_expansion(dim, cutoff, regularity));
  return c;
}

std::string to_text(const DistributionCoefficientSet& c) {
  std::ostringstream os;
  char head[96];
  std::snprintf(head, sizeof(head), "%d %d %.17g %.17g\n", c.dim, c.cutoff, c.regularity, c.beta);
  os << head;
  for (const auto& e : c.sigma) os << to_text(e);
  for (const auto& e : c.b) os << to_text(e);
  return os.str();
}

DistributionCoefficientSet coefficient_set_from_text(const std::string& text) {
  std::istringstream is(text);
  int dim = 0, cutoff = -1;
  double p = 0.0, beta = 0.0;
  if (!(is >> dim >> cutoff >> p >> beta))
    throw std::runtime_error("coefficient set: malformed header");
  DistributionCoefficientSet c = make_coefficient_set(dim, cutoff, p);
  c.beta = beta;
  for (auto& e : c.sigma) e = read_text(is);
  for (auto& e : c.b) e = read_text(is);
  c.validate();
  return c;
}

Eigen::VectorXd lift_drift(const DistributionCoefficientSet& coeffs, const Eigen::VectorXd& z,
                           const ExpansionVector& xi, const QuadratureRule& rule) {
  if (xi.dim != coeffs.dim || xi.cutoff != coeffs.cutoff)
    throw std::invalid_argument("lift_drift: xi shape mismatch");
  const ExpansionVector txi = translate(xi, z, rule);
  Eigen::VectorXd out(coeffs.dim);
  for (int i = 0; i < coeffs.dim; ++i) out[i] = dual_pair(coeffs.b[static_cast<std::size_t>(i)], txi);
  return out;
}

Eigen::MatrixXd lift_diffusion(const DistributionCoefficientSet& coeffs, const Eigen::VectorXd& z,
                               const ExpansionVector& xi, const QuadratureRule& rule) {
  if (xi.dim != coeffs.dim || xi.cutoff != coeffs.cutoff)
    throw std::invalid_argument("lift_diffusion: xi shape mismatch");
  const ExpansionVector txi = translate(xi, z, rule);
  Eigen::MatrixXd out(coeffs.dim, coeffs.dim);
  for (int i = 0; i < coeffs.dim; ++i)
    for (int j = 0; j < coeffs.dim; ++j) out(i, j) = dual_pair(coeffs.sigma_at(i, j), txi);
  return out;
}

Eigen::VectorXd lift_small_jump(const SmallJumpFamily& fam, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& x, const ExpansionVector& xi,
                                const QuadratureRule& rule) {
  const double r = x.norm();
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("lift_small_jump: mark must satisfy 0 < |x| < 1");
  return fam.evaluate(translate(xi, z, rule), x);
}

Eigen::VectorXd lift_large_jump(const LargeJumpFamily& fam, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& x, const ExpansionVector& xi,
                                const QuadratureRule& rule) {
  if (x.norm() < 1.0) throw std::invalid_argument("lift_large_jump: mark must satisfy |x| >= 1");
  return fam.evaluate(translate(xi, z, rule), x);
}

namespace {

struct LiftedState {
  DistributionCoefficientSet coeffs;
  std::optional<SmallJumpFamily> fam_f;
  std::optional<LargeJumpFamily> fam_g;
  ExpansionVector xi;
  TranslationCache cache;

  LiftedState(DistributionCoefficientSet c, std::optional<SmallJumpFamily> ff,
              std::optional<LargeJumpFamily> fg, ExpansionVector x, QuadratureRule rule,
              std::size_t cap)
      : coeffs(std::move(c)),
        fam_f(std::move(ff)),
        fam_g(std::move(fg)),
        xi(std::move(x)),
        cache(MultiIndexSet::get(coeffs.dim, coeffs.cutoff), std::move(rule), cap) {}

  ExpansionVector translated(const Eigen::VectorXd& z) const {
    if (z.isZero(0.0)) return xi;  // tau_0 is the identity
    const auto t = cache.translation(z);
    ExpansionVector out(xi.dim, xi.cutoff, xi.regularity);
    out.coeffs = t->transpose() * xi.coeffs;
    return out;
  }
};

}  // namespace

CoefficientEvaluator make_lifted_evaluator(const DistributionCoefficientSet& coeffs,
                                           std::optional<SmallJumpFamily> fam_f,
                                           std::optional<LargeJumpFamily> fam_g,
                                           const ExpansionVector& xi, const QuadratureRule& rule,
                                           std::size_t cache_capacity) {
  coeffs.validate();
  if (xi.dim != coeffs.dim || xi.cutoff != coeffs.cutoff)
    throw std::invalid_argument("make_lifted_evaluator: xi shape mismatch");
  auto state = std::make_shared<LiftedState>(coeffs, std::move(fam_f), std::move(fam_g), xi, rule,
                                             cache_capacity);

  CoefficientEvaluator ev;
  ev.dim = coeffs.dim;
  ev.synthetic = false;
  ev.label = "lifted";
  ev.drift = [state](const Eigen::VectorXd& z) {
    const ExpansionVector txi = state->translated(z);
    Eigen::VectorXd out(state->coeffs.dim);
    for (int i = 0; i < state->coeffs.dim; ++i)
      out[i] = dual_pair(state->coeffs.b[static_cast<std::size_t>(i)], txi);
    return out;
  };
  ev.diffusion = [state](const Eigen::VectorXd& z) {
    const ExpansionVector txi = state->translated(z);
    Eigen::MatrixXd out(state->coeffs.dim, state->coeffs.dim);
    for (int i = 0; i < state->coeffs.dim; ++i)
      for (int j = 0; j < state->coeffs.dim; ++j)
        out(i, j) = dual_pair(state->coeffs.sigma_at(i, j), txi);
    return out;
  };
  ev.small_jump = [state](const Eigen::VectorXd& z, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!state->fam_f) return Eigen::VectorXd::Zero(state->coeffs.dim);
    const double r = x.norm();
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("small_jump: mark must satisfy 0 < |x| < 1");
    return state->fam_f->evaluate(state->translated(z), x);
  };
  ev.large_jump = [state](const Eigen::VectorXd& z, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!state->fam_g) return Eigen::VectorXd::Zero(state->coeffs.dim);
    if (x.norm() < 1.0) throw std::invalid_argument("large_jump: mark must satisfy |x| >= 1");
    return state->fam_g->evaluate(state->translated(z), x);
  };
  return ev;
}

CoefficientEvaluator make_constant_drift_evaluator(const Eigen::VectorXd& c) {
  CoefficientEvaluator ev;
  const int d = static_cast<int>(c.size());
  ev.dim = d;
  ev.synthetic = true;
  ev.label = "synthetic-constant";
  ev.drift = [c](const Eigen::VectorXd&) { return c; };
  ev.diffusion = [d](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(d, d).eval(); };
  ev.small_jump = [d](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(d).eval();
  };
  ev.large_jump = [d](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(d).eval();
  };
  return ev;
}

CoefficientEvaluator make_cubic_drift_evaluator(int dim, double scale) {
  CoefficientEvaluator ev;
  ev.dim = dim;
  ev.synthetic = true;
  ev.label = "synthetic-cubic";
  ev.drift = [scale](const Eigen::VectorXd& z) {
    return (scale * z.squaredNorm() * z.array()).matrix().eval();
  };
  ev.diffusion = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(dim, dim).eval(); };
  ev.small_jump = [dim](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(dim).eval();
  };
  ev.large_jump = [dim](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(dim).eval();
  };
  return ev;
}

}  // namespace hsde
