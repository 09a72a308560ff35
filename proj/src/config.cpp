#include "hsde/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hsde {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& section, const std::string& key,
                       const std::string& why) {
  throw std::invalid_argument("[" + section + "] " + key + ": " + why);
}

double parse_double(const std::string& section, const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) fail(section, key, "trailing characters in number '" + raw + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(section, key, "not a number: '" + raw + "'");
  } catch (const std::out_of_range&) {
    fail(section, key, "number out of range: '" + raw + "'");
  }
}

}  // namespace

IniDoc IniDoc::parse(const std::string& text) {
  IniDoc doc;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      doc.sections_.try_emplace(section);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    doc.sections_[section].emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return doc;
}

bool IniDoc::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return false;
  for (const auto& [k, v] : it->second)
    if (k == key) return true;
  return false;
}

std::string IniDoc::get_string(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end())
    for (const auto& [k, v] : it->second)
      if (k == key) return v;
  fail(section, key, "missing required key");
}

std::string IniDoc::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double IniDoc::get_double(const std::string& section, const std::string& key) const {
  return parse_double(section, key, get_string(section, key));
}

double IniDoc::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long IniDoc::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) fail(section, key, "expected an integer");
  return n;
}

long IniDoc::get_int(const std::string& section, const std::string& key, long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<std::string> IniDoc::get_tokens(const std::string& section,
                                            const std::string& key) const {
  std::istringstream is(get_string(section, key));
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<double> IniDoc::get_doubles(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : get_tokens(section, key)) out.push_back(parse_double(section, key, tok));
  return out;
}

std::vector<std::string> IniDoc::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it != sections_.end())
    for (const auto& [k, v] : it->second) out.push_back(k);
  return out;
}

namespace {

// Expansion expression grammar: `[scale *] zero | delta0 | hermite n_1 [n_2 n_3]`.
ExpansionVector parse_expansion(const IniDoc& ini, const std::string& section,
                                const std::string& key, int dim, int cutoff, double regularity) {
  std::vector<std::string> toks = ini.get_tokens(section, key);
  double scale = 1.0;
  if (toks.size() >= 2 && toks[1] == "*") {
    scale = parse_double(section, key, toks[0]);
    toks.erase(toks.begin(), toks.begin() + 2);
  }
  if (toks.empty()) fail(section, key, "empty expansion expression");
  ExpansionVector out;
  if (toks[0] == "zero") {
    out = zero_expansion(dim, cutoff, regularity);
  } else if (toks[0] == "delta0") {
    out = delta0_expansion(dim, cutoff, regularity);
  } else if (toks[0] == "hermite") {
    if (static_cast<int>(toks.size()) != 1 + dim)
      fail(section, key, "hermite needs exactly d order entries");
    MultiIndex n;
    n.dim = dim;
    for (int a = 0; a < dim; ++a) {
      const double v = parse_double(section, key, toks[static_cast<std::size_t>(1 + a)]);
      n.entries[static_cast<std::size_t>(a)] = static_cast<int>(v);
      if (static_cast<double>(n.entries[static_cast<std::size_t>(a)]) != v || v < 0)
        fail(section, key, "hermite orders must be non-negative integers");
    }
    if (n.order() > cutoff) fail(section, key, "hermite order exceeds the cutoff");
    out = basis_expansion(n, cutoff, regularity);
  } else {
    fail(section, key, "unknown expansion kind '" + toks[0] + "'");
  }
  out.coeffs *= scale;
  return out;
}

Eigen::VectorXd parse_vector(const IniDoc& ini, const std::string& section, const std::string& key,
                             int dim) {
  const std::vector<double> v = ini.get_doubles(section, key);
  if (static_cast<int>(v.size()) != dim) fail(section, key, "expected exactly d entries");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

// `x_1 .. x_d intensity ; x_1 .. x_d intensity ; ...`
std::vector<JumpAtom> parse_atoms(const IniDoc& ini, const std::string& section,
                                  const std::string& key, int dim) {
  std::vector<JumpAtom> out;
  std::istringstream is(ini.get_string(section, key));
  std::string group;
  while (std::getline(is, group, ';')) {
    std::istringstream gs(group);
    std::vector<double> nums;
    double v;
    while (gs >> v) nums.push_back(v);
    if (nums.empty()) continue;
    if (static_cast<int>(nums.size()) != dim + 1)
      fail(section, key, "each atom needs d mark entries plus an intensity");
    JumpAtom a;
    a.mark = Eigen::Map<const Eigen::VectorXd>(nums.data(), dim);
    a.intensity = nums.back();
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

RunConfig load_config(const std::string& text) {
  const IniDoc ini = IniDoc::parse(text);
  RunConfig c;
  c.source_text = text;

  c.dimension = static_cast<int>(ini.get_int("run", "dimension", 1));
  if (c.dimension < 1 || c.dimension > 3) fail("run", "dimension", "must be in [1,3]");
  c.regularity = ini.get_double("run", "regularity", 1.0);
  if (!(c.regularity > 0.0)) fail("run", "regularity", "must be > 0");
  c.cutoff = static_cast<int>(ini.get_int("run", "cutoff", c.dimension == 1 ? 16 : 8));
  if (c.cutoff < 0) fail("run", "cutoff", "must be >= 0");
  c.quad_zmax = ini.get_double("run", "quad_zmax", 8.0);
  c.horizon = ini.get_double("run", "horizon", 1.0);
  if (!(c.horizon > 0.0)) fail("run", "horizon", "must be > 0");
  c.steps = static_cast<int>(ini.get_int("run", "steps", 1024));
  if (c.steps < 1) fail("run", "steps", "must be >= 1");
  c.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", 1));
  c.replications = static_cast<int>(ini.get_int("run", "replications", 1));
  if (c.replications < 1) fail("run", "replications", "must be >= 1");
  c.threads = static_cast<int>(ini.get_int("run", "threads", 0));

  const std::string solver = ini.get_string("run", "solver", "euler");
  if (solver == "euler") c.solver = SolverKind::kEuler;
  else if (solver == "picard") c.solver = SolverKind::kPicard;
  else if (solver == "interlace") c.solver = SolverKind::kInterlace;
  else if (solver == "local") c.solver = SolverKind::kLocal;
  else fail("run", "solver", "must be euler | picard | interlace | local");

  c.coefficient_type = ini.get_string("coefficients", "type", "lifted");
  if (c.coefficient_type == "lifted") {
    c.coefficients = make_coefficient_set(c.dimension, c.cutoff, c.regularity);
    for (int i = 0; i < c.dimension; ++i) {
      const std::string bkey = "b_" + std::to_string(i + 1);
      if (ini.has("coefficients", bkey))
        c.coefficients.b[static_cast<std::size_t>(i)] =
            parse_expansion(ini, "coefficients", bkey, c.dimension, c.cutoff, c.regularity);
      for (int j = 0; j < c.dimension; ++j) {
        const std::string skey = "sigma_" + std::to_string(i + 1) + std::to_string(j + 1);
        if (ini.has("coefficients", skey))
          c.coefficients.sigma_at(i, j) =
              parse_expansion(ini, "coefficients", skey, c.dimension, c.cutoff, c.regularity);
      }
    }
    c.coefficients.beta =
        ini.get_double("coefficients", "beta", c.coefficients.min_beta() * (1.0 + 1e-12));
    c.coefficients.validate();
  } else if (c.coefficient_type == "synthetic_cubic") {
    c.cubic_scale = ini.get_double("coefficients", "scale", 1.0);
  } else if (c.coefficient_type == "synthetic_constant") {
    c.constant_drift = ini.has("coefficients", "c")
                           ? parse_vector(ini, "coefficients", "c", c.dimension)
                           : Eigen::VectorXd::Zero(c.dimension).eval();
  } else {
    fail("coefficients", "type", "must be lifted | synthetic_cubic | synthetic_constant");
  }

  if (ini.get_string("family_f", "kind", "none") != "none") {
    if (ini.get_string("family_f", "kind") != "clamped_linear")
      fail("family_f", "kind", "must be none | clamped_linear");
    SmallJumpFamily f;
    MultiIndex ground;
    ground.dim = c.dimension;
    f.phi = ini.has("family_f", "phi")
                ? parse_expansion(ini, "family_f", "phi", c.dimension, c.cutoff, c.regularity)
                : basis_expansion(ground, c.cutoff, c.regularity);
    f.slope = ini.get_double("family_f", "slope", 0.5);
    f.bound = ini.get_double("family_f", "clamp", 1.0);
    f.offset = ini.get_double("family_f", "offset", 0.0);
    f.regularity = c.regularity;
    if (!(f.slope >= 0.0)) fail("family_f", "slope", "must be >= 0");
    if (!(f.bound > 0.0)) fail("family_f", "clamp", "must be > 0");
    c.family_f = std::move(f);
  }

  const std::string gkind = ini.get_string("family_g", "kind", "none");
  if (gkind != "none") {
    LargeJumpFamily g;
    if (gkind == "identity") {
      g.kind = LargeJumpFamily::Kind::kIdentity;
    } else if (gkind == "tanh_gain") {
      g.kind = LargeJumpFamily::Kind::kTanhGain;
      MultiIndex ground;
      ground.dim = c.dimension;
      g.phi = ini.has("family_g", "phi")
                  ? parse_expansion(ini, "family_g", "phi", c.dimension, c.cutoff, c.regularity)
                  : basis_expansion(ground, c.cutoff, c.regularity);
    } else {
      fail("family_g", "kind", "must be none | identity | tanh_gain");
    }
    c.family_g = std::move(g);
  }

  c.levy.dim = c.dimension;
  if (ini.has("levy", "small_atoms"))
    c.levy.small_atoms = parse_atoms(ini, "levy", "small_atoms", c.dimension);
  c.levy.large_rate = ini.get_double("levy", "large_rate", 0.0);
  const std::string sampler = ini.get_string("levy", "large_sampler", "atoms");
  if (sampler == "atoms") {
    c.levy.large_sampler.kind = LargeMarkSampler::Kind::kAtoms;
    if (ini.has("levy", "large_atoms"))
      c.levy.large_sampler.atoms = parse_atoms(ini, "levy", "large_atoms", c.dimension);
    else if (c.levy.large_rate > 0.0)
      fail("levy", "large_atoms", "required when large_rate > 0 and sampler is atoms");
  } else if (sampler == "uniform_shell") {
    c.levy.large_sampler.kind = LargeMarkSampler::Kind::kUniformShell;
    const std::vector<double> sh = ini.get_doubles("levy", "shell");
    if (sh.size() != 2) fail("levy", "shell", "expected 'inner outer'");
    c.levy.large_sampler.shell_inner = sh[0];
    c.levy.large_sampler.shell_outer = sh[1];
  } else {
    fail("levy", "large_sampler", "must be atoms | uniform_shell");
  }
  c.levy.validate();

  // xi lives in the dual space: regularity order -p.
  c.xi = ini.has("initial", "xi")
             ? parse_expansion(ini, "initial", "xi", c.dimension, c.cutoff, -c.regularity)
             : delta0_expansion(c.dimension, c.cutoff, -c.regularity);
  c.kappa = ini.has("initial", "kappa") ? parse_vector(ini, "initial", "kappa", c.dimension)
                                        : Eigen::VectorXd::Zero(c.dimension).eval();

  c.k_max = static_cast<int>(ini.get_int("solver", "k_max", 50));
  if (c.k_max < 1) fail("solver", "k_max", "must be >= 1");
  c.tol = ini.get_double("solver", "tol", 1e-10);
  if (!(c.tol > 0.0)) fail("solver", "tol", "must be > 0");
  if (ini.has("solver", "m_levels")) {
    c.m_levels = ini.get_doubles("solver", "m_levels");
    for (std::size_t i = 0; i < c.m_levels.size(); ++i) {
      if (!(c.m_levels[i] > 0.0)) fail("solver", "m_levels", "levels must be > 0");
      if (i > 0 && c.m_levels[i] <= c.m_levels[i - 1])
        fail("solver", "m_levels", "levels must be strictly increasing");
    }
  }
  c.truncation_radius = ini.get_double("solver", "radius", 8.0);
  if (!(c.truncation_radius > 0.0)) fail("solver", "radius", "must be > 0");
  if (c.solver == SolverKind::kLocal && c.m_levels.empty())
    fail("solver", "m_levels", "required for solver = local");

  if (ini.has("checks", "run")) c.checks = ini.get_tokens("checks", "run");
  for (const auto& name : c.checks)
    if (name != "growth" && name != "uniqueness" && name != "picard_decay" &&
        name != "interlace" && name != "truncation" && name != "hypotheses")
      fail("checks", "run", "unknown check '" + name + "'");
  c.check_samples = static_cast<int>(ini.get_int("checks", "samples", 200));
  if (c.check_samples < 2) fail("checks", "samples", "must be >= 2");
  c.check_radius = ini.get_double("checks", "radius", 3.0);
  if (!(c.check_radius > 0.0)) fail("checks", "radius", "must be > 0");
  c.check_replications = static_cast<int>(ini.get_int("checks", "replications", 20));
  if (c.check_replications < 1) fail("checks", "replications", "must be >= 1");
  if (ini.has("checks", "uniqueness_m")) {
    c.check_m_list.clear();
    for (double v : ini.get_doubles("checks", "uniqueness_m")) {
      if (v < 1 || static_cast<double>(static_cast<int>(v)) != v)
        fail("checks", "uniqueness_m", "grid sizes must be positive integers");
      c.check_m_list.push_back(static_cast<int>(v));
    }
  }

  return c;
}

QuadratureRule config_rule(const RunConfig& config) {
  return default_rule(config.cutoff, config.quad_zmax);
}

SolveProblem build_problem(const RunConfig& config) {
  SolveProblem prob;
  prob.model = config.levy;
  prob.kappa = config.kappa;
  prob.horizon = config.horizon;
  prob.steps = config.steps;

  if (config.coefficient_type == "lifted") {
    // Cache sized to hold one full grid sweep so Picard iterations can reuse
    // translations from earlier sweeps.
    const std::size_t cap = std::max<std::size_t>(1024, 2 * static_cast<std::size_t>(config.steps) + 64);
    prob.evaluator = make_lifted_evaluator(config.coefficients, config.family_f, config.family_g,
                                           config.xi, config_rule(config), cap);
  } else if (config.coefficient_type == "synthetic_cubic") {
    prob.evaluator = make_cubic_drift_evaluator(config.dimension, config.cubic_scale);
  } else {
    prob.evaluator = make_constant_drift_evaluator(config.constant_drift);
  }
  prob.validate();
  return prob;
}

}  // namespace hsde
