#include "hsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hsde {

namespace {

constexpr double kOverflowGuard = 1e100;

bool state_ok(const Eigen::VectorXd& u) { return u.allFinite() && u.norm() < kOverflowGuard; }

struct SegmentResult {
  // Node times in parent time, paired row-wise with states; excludes the
  // segment start.
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  Eigen::VectorXd final_state;
  bool overflow = false;
  double overflow_time = std::numeric_limits<double>::infinity();
};

// Reduced left-point Euler over one view segment of length h starting at y0.
SegmentResult integrate_reduced_segment(const CoefficientEvaluator& ev, const LevyModel& model,
                                        const NoiseView& view, double h,
                                        const Eigen::VectorXd& y0) {
  SegmentResult res;
  res.final_state = y0;
  if (h <= 0.0) return res;

  const bool has_atoms = !model.small_atoms.empty();
  Eigen::VectorXd u = y0;
  double prev = 0.0;
  for (double t : view.segment_nodes(h)) {
    const double delta = t - prev;
    const Eigen::VectorXd db = view.increment_over(prev, t);
    Eigen::VectorXd next = u + ev.drift(u) * delta + ev.diffusion(u) * db;
    if (has_atoms) {
      for (const auto& e : view.small_events_between(prev, t)) next += ev.small_jump(u, e.mark);
      for (const auto& a : model.small_atoms)
        next -= delta * a.intensity * ev.small_jump(u, a.mark);
    }
    u = next;
    res.times.push_back(view.offset() + t);
    res.states.push_back(u);
    if (!state_ok(u)) {
      res.overflow = true;
      res.overflow_time = view.offset() + t;
      break;
    }
    prev = t;
  }
  res.final_state = u;
  return res;
}

PathRecord finish_record(int dim, const Eigen::VectorXd& kappa, std::vector<double> times,
                         std::vector<Eigen::VectorXd> states, std::vector<char> jump_flags) {
  PathRecord rec;
  rec.times.reserve(times.size() + 1);
  rec.times.push_back(0.0);
  rec.times.insert(rec.times.end(), times.begin(), times.end());
  rec.states.resize(static_cast<Eigen::Index>(rec.times.size()), dim);
  rec.states.row(0) = kappa.transpose();
  for (std::size_t i = 0; i < states.size(); ++i)
    rec.states.row(static_cast<Eigen::Index>(i + 1)) = states[i].transpose();
  rec.is_large_jump.assign(rec.times.size(), 0);
  for (std::size_t i = 0; i < jump_flags.size(); ++i)
    rec.is_large_jump[i + 1] = jump_flags[i];
  return rec;
}

}  // namespace

void SolveProblem::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("SolveProblem: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("SolveProblem: steps must be >= 1");
  if (kappa.size() != evaluator.dim)
    throw std::invalid_argument("SolveProblem: kappa dimension mismatch");
  if (model.dim != evaluator.dim)
    throw std::invalid_argument("SolveProblem: model dimension mismatch");
  model.validate();
}

void SolveProblem::require_matching(const NoiseRealization& noise) const {
  if (noise.dim != evaluator.dim || noise.steps != steps ||
      std::abs(noise.horizon - horizon) > 1e-12 * std::max(1.0, horizon))
    throw std::invalid_argument("solver: noise realization does not match the problem grid");
}

double PathRecord::sup_distance(const PathRecord& other) const {
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < times.size() && j < other.times.size()) {
    if (times[i] == other.times[j]) {
      const auto a = states.row(static_cast<Eigen::Index>(i));
      const auto b = other.states.row(static_cast<Eigen::Index>(j));
      const bool fa = a.allFinite(), fb = b.allFinite();
      if (fa && fb) {
        worst = std::max(worst, (a - b).norm());
      } else if (fa != fb) {
        return std::numeric_limits<double>::infinity();
      }
      ++i;
      ++j;
    } else if (times[i] < other.times[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return worst;
}

bool PathRecord::bit_identical(const PathRecord& other) const {
  if (times != other.times || is_large_jump != other.is_large_jump) return false;
  if (states.rows() != other.states.rows() || states.cols() != other.states.cols()) return false;
  for (Eigen::Index i = 0; i < states.size(); ++i)
    if (states(i) != other.states(i)) return false;
  return true;
}

PathRecord solve_reduced_euler(const SolveProblem& prob, const NoiseRealization& noise) {
  prob.validate();
  prob.require_matching(noise);
  const NoiseView view(noise, 0.0);
  SegmentResult seg =
      integrate_reduced_segment(prob.evaluator, prob.model, view, prob.horizon, prob.kappa);
  PathRecord rec = finish_record(prob.evaluator.dim, prob.kappa, seg.times, seg.states,
                                 std::vector<char>(seg.times.size(), 0));
  rec.overflow = seg.overflow;
  rec.overflow_time = seg.overflow_time;
  return rec;
}

std::pair<PathRecord, PicardTrace> picard_solve(const SolveProblem& prob,
                                                const NoiseRealization& noise, int k_max,
                                                double tol) {
  prob.validate();
  prob.require_matching(noise);
  if (k_max < 1) throw std::invalid_argument("picard_solve: k_max must be >= 1");

  const int m = prob.steps;
  const int d = prob.evaluator.dim;
  const double dt = noise.dt();
  const bool has_atoms = !prob.model.small_atoms.empty();

  // Small events binned once per step: event times in (t_k, t_{k+1}].
  std::vector<std::vector<const NoiseEvent*>> binned(static_cast<std::size_t>(m));
  for (const auto& e : noise.small_events) {
    int k = static_cast<int>(std::ceil(e.time / dt)) - 1;
    while (k + 1 < m && e.time > noise.grid_time(k + 1)) ++k;
    while (k >= 0 && e.time <= noise.grid_time(k)) --k;
    if (k >= 0 && k < m) binned[static_cast<std::size_t>(k)].push_back(&e);
  }

  Eigen::MatrixXd cur(m + 1, d);
  for (int k = 0; k <= m; ++k) cur.row(k) = prob.kappa.transpose();

  PicardTrace trace;
  PathRecord rec;
  for (int it = 0; it < k_max; ++it) {
    Eigen::MatrixXd next(m + 1, d);
    next.row(0) = prob.kappa.transpose();
    Eigen::VectorXd acc = prob.kappa;
    for (int k = 0; k < m; ++k) {
      const Eigen::VectorXd u = cur.row(k).transpose();
      acc += prob.evaluator.drift(u) * dt + prob.evaluator.diffusion(u) * noise.brownian.col(k);
      if (has_atoms) {
        for (const auto* e : binned[static_cast<std::size_t>(k)])
          acc += prob.evaluator.small_jump(u, e->mark);
        for (const auto& a : prob.model.small_atoms)
          acc -= dt * a.intensity * prob.evaluator.small_jump(u, a.mark);
      }
      next.row(k + 1) = acc.transpose();
    }
    double e = 0.0;
    for (int k = 0; k <= m; ++k)
      e = std::max(e, (next.row(k) - cur.row(k)).norm());
    trace.sup_deltas.push_back(e);
    cur.swap(next);
    trace.iterations = it + 1;
    if (e <= tol) {
      trace.converged = true;
      break;
    }
  }

  // Diagnostic contraction rate: largest (k+2) e_{k+1} / (T e_k).
  for (std::size_t k = 0; k + 1 < trace.sup_deltas.size(); ++k) {
    if (trace.sup_deltas[k] > 0.0)
      trace.fitted_contraction =
          std::max(trace.fitted_contraction, static_cast<double>(k + 2) *
                                                 trace.sup_deltas[k + 1] /
                                                 (prob.horizon * trace.sup_deltas[k]));
  }

  rec.times.resize(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) rec.times[static_cast<std::size_t>(k)] = noise.grid_time(k);
  rec.states = cur;
  rec.is_large_jump.assign(static_cast<std::size_t>(m) + 1, 0);
  if (!cur.allFinite()) rec.overflow = true;
  return {std::move(rec), std::move(trace)};
}

Eigen::VectorXd apply_large_jump(const CoefficientEvaluator& ev, const Eigen::VectorXd& pre,
                                 const Eigen::VectorXd& mark) {
  return pre + ev.large_jump(pre, mark);
}

PathRecord interlace_solve(const SolveProblem& prob, const NoiseRealization& noise) {
  prob.validate();
  prob.require_matching(noise);

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<char> flags;
  std::vector<LargeJumpApplication> jumps;
  bool overflow = false;
  double overflow_time = std::numeric_limits<double>::infinity();

  Eigen::VectorXd u = prob.kappa;
  double start = 0.0;
  std::size_t next_event = 0;
  while (true) {
    const bool has_event = next_event < noise.large_events.size();
    const double end = has_event ? noise.large_events[next_event].time : prob.horizon;
    if (end > start) {
      SegmentResult seg = integrate_reduced_segment(prob.evaluator, prob.model,
                                                    NoiseView(noise, start), end - start, u);
      times.insert(times.end(), seg.times.begin(), seg.times.end());
      states.insert(states.end(), seg.states.begin(), seg.states.end());
      flags.insert(flags.end(), seg.times.size(), 0);
      u = seg.final_state;
      if (seg.overflow) {
        overflow = true;
        overflow_time = seg.overflow_time;
        break;
      }
    }
    if (!has_event) break;
    const NoiseEvent& ev = noise.large_events[next_event];
    LargeJumpApplication app;
    app.time = ev.time;
    app.mark = ev.mark;
    app.pre_state = u;
    u = apply_large_jump(prob.evaluator, u, ev.mark);
    app.post_state = u;
    jumps.push_back(std::move(app));
    // The segment above ends exactly at the arrival; the row at the arrival
    // time carries the post-jump value (rcll convention).
    if (!times.empty() && times.back() == ev.time) {
      states.back() = u;
      flags.back() = 1;
    } else {
      times.push_back(ev.time);
      states.push_back(u);
      flags.push_back(1);
    }
    if (!state_ok(u)) {
      overflow = true;
      overflow_time = ev.time;
      break;
    }
    start = ev.time;
    ++next_event;
  }

  PathRecord rec = finish_record(prob.evaluator.dim, prob.kappa, times, states, flags);
  rec.large_jumps = std::move(jumps);
  rec.overflow = overflow;
  rec.overflow_time = overflow_time;
  return rec;
}

CoefficientEvaluator truncate_coeffs(const CoefficientEvaluator& ev, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("truncate_coeffs: radius must be > 0");
  CoefficientEvaluator out = ev;
  out.label = ev.label + "+truncated";
  const double r = radius;

  out.drift = [inner = ev.drift, r](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const double n = z.norm();
    if (n <= r) return inner(z);
    if (n >= 2.0 * r) return Eigen::VectorXd::Zero(z.size());
    return ((2.0 * r - n) / r) * inner(z * (r / n));
  };
  out.diffusion = [inner = ev.diffusion, r, d = ev.dim](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    const double n = z.norm();
    if (n <= r) return inner(z);
    if (n >= 2.0 * r) return Eigen::MatrixXd::Zero(d, d);
    return ((2.0 * r - n) / r) * inner(z * (r / n));
  };
  out.small_jump = [inner = ev.small_jump, r](const Eigen::VectorXd& z,
                                              const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double n = z.norm();
    if (n <= r) return inner(z, x);
    if (n >= 2.0 * r) return Eigen::VectorXd::Zero(z.size());
    return ((2.0 * r - n) / r) * inner(z * (r / n), x);
  };
  // large_jump deliberately untouched.
  return out;
}

namespace {

struct Crossing {
  bool crossed = false;
  double grid_time = std::numeric_limits<double>::infinity();
  double refined_time = std::numeric_limits<double>::infinity();
};

Crossing detect_crossing(const PathRecord& path, double level) {
  Crossing c;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double r = path.states.row(static_cast<Eigen::Index>(i)).norm();
    if (r >= level) {
      c.crossed = true;
      c.grid_time = path.times[i];
      c.refined_time = path.times[i];
      if (i > 0 && !path.is_large_jump[i]) {
        const double r0 = path.states.row(static_cast<Eigen::Index>(i - 1)).norm();
        if (r > r0 && level >= r0)
          c.refined_time =
              path.times[i - 1] + (path.times[i] - path.times[i - 1]) * (level - r0) / (r - r0);
      }
      return c;
    }
  }
  return c;
}

double aitken(double t1, double t2, double t3) {
  const double d1 = t2 - t1;
  const double d2 = t3 - t2;
  const double denom = d2 - d1;
  if (denom == 0.0) return t3;
  return t3 - d2 * d2 / denom;
}

}  // namespace

PathRecord solve_local(const SolveProblem& prob, const NoiseRealization& noise,
                       const std::vector<double>& m_levels) {
  prob.validate();
  prob.require_matching(noise);
  if (m_levels.empty()) throw std::invalid_argument("solve_local: need at least one level");
  for (std::size_t i = 0; i < m_levels.size(); ++i) {
    if (!(m_levels[i] > 0.0)) throw std::invalid_argument("solve_local: levels must be > 0");
    if (i > 0 && m_levels[i] <= m_levels[i - 1])
      throw std::invalid_argument("solve_local: levels must be strictly increasing");
  }

  std::vector<PathRecord> paths;
  std::vector<Crossing> crossings;
  paths.reserve(m_levels.size());
  for (double m : m_levels) {
    SolveProblem level_prob = prob;
    level_prob.evaluator = truncate_coeffs(prob.evaluator, m);
    paths.push_back(interlace_solve(level_prob, noise));
    crossings.push_back(detect_crossing(paths.back(), m));
  }

  // Consecutive levels must agree exactly while below the smaller radius:
  // the truncation is the identity there, so any mismatch is a solver bug.
  for (std::size_t i = 0; i + 1 < m_levels.size(); ++i) {
    const PathRecord& a = paths[i];
    const PathRecord& b = paths[i + 1];
    if (a.times != b.times)
      throw std::runtime_error("solve_local: level paths disagree on node times");
    const double upto = crossings[i].crossed ? crossings[i].grid_time
                                             : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.times.size() && a.times[k] <= upto; ++k) {
      for (int c = 0; c < a.dim(); ++c)
        if (a.states(static_cast<Eigen::Index>(k), c) != b.states(static_cast<Eigen::Index>(k), c))
          throw std::runtime_error("solve_local: consistency violation between levels " +
                                   std::to_string(m_levels[i]) + " and " +
                                   std::to_string(m_levels[i + 1]));
    }
  }

  ExplosionInfo info;
  info.levels = m_levels;
  bool all_crossed = true;
  for (std::size_t i = 0; i < m_levels.size(); ++i) {
    info.theta.push_back(crossings[i].grid_time);
    all_crossed = all_crossed && crossings[i].crossed;
  }

  const double dt = noise.dt();
  PathRecord out = paths.back();

  if (all_crossed) {
    info.eta_theta_max = crossings.back().grid_time;

    // Hitting times of the explicit scheme lag the dynamics by O(dt); a
    // second solve on the pairwise-coarsened noise gives a Richardson
    // correction before the Aitken limit of the level sequence.
    std::vector<double> refined;
    for (const auto& c : crossings) refined.push_back(c.refined_time);
    if (noise.steps % 2 == 0) {
      const NoiseRealization coarse = coarsen_noise(noise);
      for (std::size_t i = 0; i < m_levels.size(); ++i) {
        SolveProblem level_prob = prob;
        level_prob.evaluator = truncate_coeffs(prob.evaluator, m_levels[i]);
        level_prob.steps = coarse.steps;
        const Crossing cc = detect_crossing(interlace_solve(level_prob, coarse), m_levels[i]);
        if (cc.crossed) refined[i] = 2.0 * refined[i] - cc.refined_time;
      }
    }
    const std::size_t n = refined.size();
    info.eta_estimate =
        n >= 3 ? aitken(refined[n - 3], refined[n - 2], refined[n - 1]) : refined[n - 1];

    bool gaps_shrink = true;
    if (n >= 3) {
      const double g_prev = info.theta[n - 2] - info.theta[n - 3];
      const double g_last = info.theta[n - 1] - info.theta[n - 2];
      gaps_shrink = g_last <= std::max(2.0 * dt, 0.75 * g_prev);
    } else if (n == 2) {
      gaps_shrink = info.theta[1] - info.theta[0] <= 2.0 * dt;
    }
    info.exploded = gaps_shrink && info.eta_theta_max < prob.horizon - 2.0 * dt;

    if (info.exploded) {
      const double inf = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < out.times.size(); ++k)
        if (out.times[k] >= info.eta_estimate)
          out.states.row(static_cast<Eigen::Index>(k)).setConstant(inf);
    }
  }

  out.explosion = std::move(info);
  return out;
}

ExpansionVector localize_xi(const ExpansionVector& xi, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("localize_xi: k must be > 0");
  if (norm_p(xi, xi.regularity) <= k) return xi;
  return zero_expansion(xi.dim, xi.cutoff, xi.regularity);
}

Eigen::VectorXd localize_kappa(const Eigen::VectorXd& kappa, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("localize_kappa: level must be > 0");
  if (kappa.norm() <= level) return kappa;  // closed condition: |kappa| == level is kept
  return Eigen::VectorXd::Zero(kappa.size());
}

std::string path_to_csv(const PathRecord& path) {
  std::string out = "t";
  for (int c = 0; c < path.dim(); ++c) out += ",U_" + std::to_string(c + 1);
  out += ",is_large_jump\n";
  char buf[40];
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", path.times[i]);
    out += buf;
    for (int c = 0; c < path.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", path.states(static_cast<Eigen::Index>(i), c));
      out += ',';
      out += buf;
    }
    out += ',';
    out += path.is_large_jump[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace hsde
