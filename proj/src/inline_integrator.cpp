#include "hsde/inline_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsde {

namespace {

struct TimedMark {
  double time;
  const Eigen::VectorXd* mark;
  bool large;
};

}  // namespace

PathRecord inline_full_euler(const SolveProblem& prob, const NoiseRealization& noise) {
  prob.validate();
  prob.require_matching(noise);

  const int m = prob.steps;
  const int d = prob.evaluator.dim;
  const double dt = noise.dt();
  const auto& ev = prob.evaluator;
  const bool has_atoms = !prob.model.small_atoms.empty();

  PathRecord rec;
  rec.times.reserve(static_cast<std::size_t>(m) + 1 + noise.large_events.size());
  std::vector<Eigen::VectorXd> states;
  std::vector<char> flags;
  std::vector<double> times;

  Eigen::VectorXd u = prob.kappa;
  std::size_t si = 0, li = 0;
  for (int k = 0; k < m && !rec.overflow; ++k) {
    const double t0 = noise.grid_time(k);
    const double t1 = noise.grid_time(k + 1);

    // Events of either kind inside (t0, t1], in time order; equal small and
    // large times cannot happen (resolved at generation).
    std::vector<TimedMark> local;
    while (si < noise.small_events.size() && noise.small_events[si].time <= t1) {
      local.push_back({noise.small_events[si].time, &noise.small_events[si].mark, false});
      ++si;
    }
    while (li < noise.large_events.size() && noise.large_events[li].time <= t1) {
      local.push_back({noise.large_events[li].time, &noise.large_events[li].mark, true});
      ++li;
    }
    std::sort(local.begin(), local.end(),
              [](const TimedMark& a, const TimedMark& b) { return a.time < b.time; });

    double s = t0;
    for (std::size_t e = 0; e <= local.size(); ++e) {
      const double send = e < local.size() ? local[e].time : t1;
      const double delta = send - s;
      if (delta > 0.0) {
        const double frac = delta / dt;
        Eigen::VectorXd move = ev.drift(u) * delta + ev.diffusion(u) * (noise.brownian.col(k) * frac);
        if (has_atoms)
          for (const auto& a : prob.model.small_atoms)
            move -= delta * a.intensity * ev.small_jump(u, a.mark);
        u += move;
      }
      if (e < local.size()) {
        if (local[e].large) {
          LargeJumpApplication app;
          app.time = local[e].time;
          app.mark = *local[e].mark;
          app.pre_state = u;
          u = u + ev.large_jump(u, *local[e].mark);
          app.post_state = u;
          rec.large_jumps.push_back(std::move(app));
          times.push_back(local[e].time);
          states.push_back(u);
          flags.push_back(1);
        } else {
          u = u + ev.small_jump(u, *local[e].mark);
        }
      }
      if (!u.allFinite() || u.norm() > 1e100) {
        rec.overflow = true;
        rec.overflow_time = send;
        break;
      }
      s = send;
    }
    if (times.empty() || times.back() != t1) {
      times.push_back(t1);
      states.push_back(u);
      flags.push_back(0);
    }
  }

  rec.times.push_back(0.0);
  rec.times.insert(rec.times.end(), times.begin(), times.end());
  rec.states.resize(static_cast<Eigen::Index>(rec.times.size()), d);
  rec.states.row(0) = prob.kappa.transpose();
  for (std::size_t i = 0; i < states.size(); ++i)
    rec.states.row(static_cast<Eigen::Index>(i + 1)) = states[i].transpose();
  rec.is_large_jump.assign(rec.times.size(), 0);
  for (std::size_t i = 0; i < flags.size(); ++i) rec.is_large_jump[i + 1] = flags[i];
  return rec;
}

}  // namespace hsde
