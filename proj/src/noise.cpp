#include "hsde/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hsde/rng.hpp"

namespace hsde {

namespace {

constexpr std::uint64_t kStreamBrownian = 1;
constexpr std::uint64_t kStreamSmall = 2;
constexpr std::uint64_t kStreamLarge = 3;

// Fixed counter layout per event: slot 0 arrival, slot 1 mark selection,
// slots 2..7 extra mark draws. Keeps every variate addressable.
constexpr std::uint64_t kSlotsPerEvent = 8;

Eigen::VectorXd sample_large_mark(const LargeMarkSampler& s, const CounterRng& rng,
                                  std::uint64_t event_index, int dim) {
  const std::uint64_t base = event_index * kSlotsPerEvent;
  if (s.kind == LargeMarkSampler::Kind::kAtoms) {
    double total = 0.0;
    for (const auto& a : s.atoms) total += a.intensity;
    const double u = rng.uniform(base + 1) * total;
    double acc = 0.0;
    for (const auto& a : s.atoms) {
      acc += a.intensity;
      if (u <= acc) return a.mark;
    }
    return s.atoms.back().mark;
  }
  // Uniform shell: radius uniform in [inner, outer], direction uniform.
  const double r = s.shell_inner + (s.shell_outer - s.shell_inner) * rng.uniform(base + 1);
  Eigen::VectorXd dir(dim);
  if (dim == 1) {
    dir[0] = rng.uniform(base + 2) < 0.5 ? -1.0 : 1.0;
  } else {
    for (int a = 0; a < dim; ++a) dir[a] = rng.normal(base / 2 + 1 + static_cast<std::uint64_t>(a));
    const double n = dir.norm();
    if (n < 1e-300) dir.setUnit(0);
    else dir /= n;
  }
  return r * dir;
}

std::vector<NoiseEvent> sample_compound_poisson(
    double rate, double horizon, const CounterRng& rng,
    const std::function<Eigen::VectorXd(std::uint64_t)>& mark_of) {
  std::vector<NoiseEvent> out;
  if (rate <= 0.0) return out;
  double t = 0.0;
  for (std::uint64_t e = 0;; ++e) {
    t += rng.exponential(e * kSlotsPerEvent, rate);
    if (!(t <= horizon)) break;
    out.push_back({t, mark_of(e)});
  }
  return out;
}

}  // namespace

void LevyModel::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("[levy] dim: must be in [1,3]");
  for (std::size_t i = 0; i < small_atoms.size(); ++i) {
    const auto& a = small_atoms[i];
    if (a.mark.size() != dim)
      throw std::invalid_argument("[levy] small_atoms[" + std::to_string(i) +
                                  "]: mark dimension mismatch");
    const double r = a.mark.norm();
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("[levy] small_atoms[" + std::to_string(i) +
                                  "]: mark must satisfy 0 < |x| < 1");
    if (!(a.intensity > 0.0))
      throw std::invalid_argument("[levy] small_atoms[" + std::to_string(i) +
                                  "]: intensity must be > 0");
  }
  if (large_rate < 0.0) throw std::invalid_argument("[levy] large_rate: must be >= 0");
  if (large_rate > 0.0 && large_sampler.kind == LargeMarkSampler::Kind::kAtoms) {
    if (large_sampler.atoms.empty())
      throw std::invalid_argument("[levy] large_sampler: needs at least one atom");
    for (std::size_t i = 0; i < large_sampler.atoms.size(); ++i) {
      const auto& a = large_sampler.atoms[i];
      if (a.mark.size() != dim)
        throw std::invalid_argument("[levy] large_sampler atoms[" + std::to_string(i) +
                                    "]: mark dimension mismatch");
      if (a.mark.norm() < 1.0)
        throw std::invalid_argument("[levy] large_sampler atoms[" + std::to_string(i) +
                                    "]: mark must satisfy |x| >= 1");
      if (!(a.intensity > 0.0))
        throw std::invalid_argument("[levy] large_sampler atoms[" + std::to_string(i) +
                                    "]: weight must be > 0");
    }
  }
  if (large_sampler.kind == LargeMarkSampler::Kind::kUniformShell) {
    if (large_sampler.shell_inner < 1.0 || large_sampler.shell_outer < large_sampler.shell_inner)
      throw std::invalid_argument("[levy] large_sampler: shell must satisfy 1 <= inner <= outer");
  }
}

NoiseRealization sample_noise(const LevyModel& model, double horizon, int steps,
                              std::uint64_t seed, std::uint64_t replication) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_noise: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("sample_noise: steps must be >= 1");
  model.validate();

  NoiseRealization n;
  n.dim = model.dim;
  n.horizon = horizon;
  n.steps = steps;
  n.seed = seed;
  n.replication = replication;

  const double root_dt = std::sqrt(horizon / steps);
  const CounterRng rb(seed, replication, kStreamBrownian);
  n.brownian.resize(model.dim, steps);
  for (int k = 0; k < steps; ++k)
    for (int a = 0; a < model.dim; ++a)
      n.brownian(a, k) =
          root_dt * rb.normal(static_cast<std::uint64_t>(k) * model.dim + static_cast<std::uint64_t>(a));

  const double lam_small = model.total_small_intensity();
  if (lam_small > 0.0) {
    const CounterRng rs(seed, replication, kStreamSmall);
    n.small_events = sample_compound_poisson(lam_small, horizon, rs, [&](std::uint64_t e) {
      const double u = rs.uniform(e * kSlotsPerEvent + 1) * lam_small;
      double acc = 0.0;
      for (const auto& a : model.small_atoms) {
        acc += a.intensity;
        if (u <= acc) return a.mark;
      }
      return model.small_atoms.back().mark;
    });
  }

  if (model.large_rate > 0.0) {
    const CounterRng rl(seed, replication, kStreamLarge);
    n.large_events = sample_compound_poisson(model.large_rate, horizon, rl, [&](std::uint64_t e) {
      return sample_large_mark(model.large_sampler, rl, e, model.dim);
    });
  }

  // Ties between streams have probability zero but would break the rcll
  // bookkeeping; resolve deterministically by nudging the large event one
  // ulp later ("large after small"). Events nudged past the horizon drop.
  for (auto& ev : n.large_events) {
    auto tied = [&](double t) {
      for (const auto& s : n.small_events)
        if (s.time == t) return true;
      return false;
    };
    while (tied(ev.time)) ev.time = std::nextafter(ev.time, horizon * 2);
  }
  for (std::size_t i = 1; i < n.large_events.size(); ++i)
    while (n.large_events[i].time <= n.large_events[i - 1].time)
      n.large_events[i].time = std::nextafter(n.large_events[i].time, horizon * 2);
  while (!n.large_events.empty() && n.large_events.back().time > horizon)
    n.large_events.pop_back();

  return n;
}

NoiseRealization coarsen_noise(const NoiseRealization& noise) {
  if (noise.steps % 2 != 0)
    throw std::invalid_argument("coarsen_noise: step count must be even");
  NoiseRealization c = noise;
  c.steps = noise.steps / 2;
  c.brownian.resize(noise.dim, c.steps);
  for (int k = 0; k < c.steps; ++k)
    c.brownian.col(k) = noise.brownian.col(2 * k) + noise.brownian.col(2 * k + 1);
  return c;
}

double compensator_integral(const LevyModel& model,
                            const std::function<double(const Eigen::VectorXd&)>& f) {
  double s = 0.0;
  for (const auto& a : model.small_atoms) s += f(a.mark) * a.intensity;
  return s;
}

Eigen::VectorXd compensator_integral_vec(
    const LevyModel& model, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(model.dim);
  for (const auto& a : model.small_atoms) s += f(a.mark) * a.intensity;
  return s;
}

Eigen::VectorXd NoiseRealization::increment_over(double a, double b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  if (!(b > a)) return out;
  const double step = dt();
  const int k0 = std::max(0, static_cast<int>(std::floor(a / step)));
  const int k1 = std::min(steps - 1, static_cast<int>(std::floor((b - 1e-18) / step)));
  for (int k = k0; k <= k1; ++k) {
    const double lo = std::max(a, grid_time(k));
    const double hi = std::min(b, grid_time(k + 1));
    if (hi <= lo) continue;
    if (lo == grid_time(k) && hi == grid_time(k + 1)) {
      out += brownian.col(k);
    } else {
      out += brownian.col(k) * ((hi - lo) / step);
    }
  }
  return out;
}

NoiseView::NoiseView(const NoiseRealization& base, double offset)
    : base_(&base), offset_(offset) {
  if (offset < 0.0 || offset > base.horizon)
    throw std::invalid_argument("shift_view: offset must lie in [0, horizon]");
}

NoiseView NoiseView::shifted(double eta) const {
  NoiseView v(*base_, offset_ + eta);
  return v;
}

std::vector<double> NoiseView::segment_nodes(double h) const {
  if (h < 0.0 || offset_ + h > base_->horizon + 1e-12)
    throw std::invalid_argument("segment_nodes: segment exceeds the realization horizon");
  std::vector<double> nodes;
  const double step = base_->dt();
  int k = static_cast<int>(std::floor(offset_ / step)) ;
  if (k < 0) k = 0;
  for (; k <= base_->steps; ++k) {
    const double t = base_->grid_time(k);
    if (t <= offset_) continue;
    if (t >= offset_ + h) break;
    nodes.push_back(t - offset_);
  }
  nodes.push_back(h);
  return nodes;
}

namespace {

std::vector<NoiseEvent> events_between_impl(const std::vector<NoiseEvent>& evs, double lo,
                                            double hi, double offset) {
  std::vector<NoiseEvent> out;
  auto it = std::upper_bound(evs.begin(), evs.end(), lo,
                             [](double t, const NoiseEvent& e) { return t < e.time; });
  for (; it != evs.end() && it->time <= hi; ++it) out.push_back({it->time - offset, it->mark});
  return out;
}

}  // namespace

std::vector<NoiseEvent> NoiseView::small_events_between(double a, double b) const {
  return events_between_impl(base_->small_events, offset_ + a, offset_ + b, offset_);
}

std::vector<NoiseEvent> NoiseView::large_events_between(double a, double b) const {
  return events_between_impl(base_->large_events, offset_ + a, offset_ + b, offset_);
}

Eigen::VectorXd NoiseView::increment_over(double a, double b) const {
  return base_->increment_over(offset_ + a, offset_ + b);
}

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void put_events(std::string& out, const std::vector<NoiseEvent>& evs, const char* tag) {
  out += tag;
  out += ' ';
  out += std::to_string(evs.size());
  out += '\n';
  for (const auto& e : evs) {
    put(out, e.time);
    for (int a = 0; a < e.mark.size(); ++a) {
      out += ' ';
      put(out, e.mark[a]);
    }
    out += '\n';
  }
}

}  // namespace

std::string to_text(const NoiseRealization& n) {
  std::string out = "noise " + std::to_string(n.dim) + ' ' + std::to_string(n.steps) + ' ';
  put(out, n.horizon);
  out += ' ' + std::to_string(n.seed) + ' ' + std::to_string(n.replication) + '\n';
  for (int k = 0; k < n.steps; ++k) {
    for (int a = 0; a < n.dim; ++a) {
      if (a) out += ' ';
      put(out, n.brownian(a, k));
    }
    out += '\n';
  }
  put_events(out, n.small_events, "small");
  put_events(out, n.large_events, "large");
  return out;
}

NoiseRealization noise_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  NoiseRealization n;
  if (!(is >> tag >> n.dim >> n.steps >> n.horizon >> n.seed >> n.replication) || tag != "noise")
    throw std::runtime_error("noise_from_text: malformed header");
  n.brownian.resize(n.dim, n.steps);
  for (int k = 0; k < n.steps; ++k)
    for (int a = 0; a < n.dim; ++a)
      if (!(is >> n.brownian(a, k))) throw std::runtime_error("noise_from_text: truncated increments");
  for (auto* list : {&n.small_events, &n.large_events}) {
    std::size_t count = 0;
    if (!(is >> tag >> count)) throw std::runtime_error("noise_from_text: missing event block");
    list->resize(count);
    for (auto& e : *list) {
      e.mark.resize(n.dim);
      if (!(is >> e.time)) throw std::runtime_error("noise_from_text: truncated events");
      for (int a = 0; a < n.dim; ++a)
        if (!(is >> e.mark[a])) throw std::runtime_error("noise_from_text: truncated events");
    }
  }
  return n;
}

}  // namespace hsde
