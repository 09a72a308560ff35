#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsde/coefficients.hpp"
#include "hsde/noise.hpp"
#include "hsde/solver.hpp"

namespace hsde {

/// Minimal INI-style document: `[section]` headers, `key = value` lines,
/// full-line comments starting with # or ;. Values stay raw strings; the
/// typed accessors parse on demand and report errors as "[section] key: ...".
class IniDoc {
 public:
  static IniDoc parse(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_tokens(const std::string& section, const std::string& key) const;
  std::vector<std::string> keys(const std::string& section) const;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

enum class SolverKind { kEuler, kPicard, kInterlace, kLocal };

struct RunConfig {
  int dimension = 1;
  double regularity = 1.0;  // p
  int cutoff = 16;          // N
  double quad_zmax = 8.0;

  // Coefficients: lifted expansions or a synthetic test double.
  std::string coefficient_type = "lifted";  // lifted | synthetic_cubic | synthetic_constant
  DistributionCoefficientSet coefficients;
  double cubic_scale = 1.0;
  Eigen::VectorXd constant_drift;

  std::optional<SmallJumpFamily> family_f;
  std::optional<LargeJumpFamily> family_g;

  LevyModel levy;

  ExpansionVector xi;
  Eigen::VectorXd kappa;

  double horizon = 1.0;
  int steps = 1024;
  std::uint64_t seed = 1;
  int replications = 1;
  int threads = 0;  // 0 = hardware concurrency

  SolverKind solver = SolverKind::kEuler;
  int k_max = 50;
  double tol = 1e-10;
  std::vector<double> m_levels;
  double truncation_radius = 8.0;

  std::vector<std::string> checks;
  int check_samples = 200;
  double check_radius = 3.0;
  int check_replications = 20;
  std::vector<int> check_m_list{64, 256, 1024, 4096};

  std::string source_text;  // raw config, echoed into artifacts
};

/// Parses and validates a full run configuration; throws std::invalid_argument
/// with a "[section] key: reason" message on the first violation.
RunConfig load_config(const std::string& text);

/// Builds the solvable instance (evaluator cache sized to the grid).
SolveProblem build_problem(const RunConfig& config);

/// The translation quadrature used by lifted evaluation for this config.
QuadratureRule config_rule(const RunConfig& config);

}  // namespace hsde
