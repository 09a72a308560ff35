#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hsde {

/// One atom of the (finite, atomic) small-jump measure, or a discrete
/// large-jump mark with sampling weight.
struct JumpAtom {
  Eigen::VectorXd mark;
  double intensity = 0.0;
};

/// Descriptor of the large-jump mark distribution (all outputs |x| >= 1).
struct LargeMarkSampler {
  enum class Kind { kAtoms, kUniformShell };
  Kind kind = Kind::kAtoms;
  std::vector<JumpAtom> atoms;  // weights, for kAtoms
  double shell_inner = 1.0;     // for kUniformShell: |x| uniform in [inner, outer]
  double shell_outer = 2.0;
};

/// Driving noise model: d-dimensional Brownian motion, a finite atomic Levy
/// measure nu on the annulus 0 < |x| < 1, and a compound-Poisson large-jump
/// stream with rate large_rate and the declared mark sampler.
struct LevyModel {
  int dim = 1;
  std::vector<JumpAtom> small_atoms;
  double large_rate = 0.0;
  LargeMarkSampler large_sampler;

  double total_small_intensity() const {
    double s = 0.0;
    for (const auto& a : small_atoms) s += a.intensity;
    return s;
  }
  void validate() const;
};

struct NoiseEvent {
  double time = 0.0;
  Eigen::VectorXd mark;
};

/// One frozen sample of the driving noise on a uniform grid. Immutable after
/// construction; reproducible bit-for-bit from (seed, replication).
struct NoiseRealization {
  int dim = 1;
  double horizon = 1.0;
  int steps = 1;
  Eigen::MatrixXd brownian;  // dim x steps, N(0, dt I) increments per step
  std::vector<NoiseEvent> small_events;  // sorted, strictly inside (0, T]
  std::vector<NoiseEvent> large_events;  // sorted; never tied with a small event
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;

  double dt() const { return horizon / steps; }
  double grid_time(int k) const { return k == steps ? horizon : k * dt(); }

  /// Brownian increment over [a, b] in [0, T]: whole steps contribute their
  /// stored increment, partial steps a proportional share. Used by the
  /// interlacing solver to split a step exactly at a large-jump time.
  Eigen::VectorXd increment_over(double a, double b) const;
};

NoiseRealization sample_noise(const LevyModel& model, double horizon, int steps,
                              std::uint64_t seed, std::uint64_t replication);

/// Pairwise-coarsened copy (steps/2, increments summed, events shared);
/// requires an even step count.
NoiseRealization coarsen_noise(const NoiseRealization& noise);

/// Exact integral of f against the atomic small-jump measure nu.
double compensator_integral(const LevyModel& model,
                            const std::function<double(const Eigen::VectorXd&)>& f);
Eigen::VectorXd compensator_integral_vec(
    const LevyModel& model, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f);

/// Read-only time-shifted window onto a realization: events and increments
/// of the parent after `offset`, re-timed to start at 0. Shifting a view
/// composes exactly: view.shifted(a).shifted(b) == view.shifted(a + b).
class NoiseView {
 public:
  explicit NoiseView(const NoiseRealization& base, double offset = 0.0);

  const NoiseRealization& base() const { return *base_; }
  double offset() const { return offset_; }
  double horizon() const { return base_->horizon - offset_; }

  NoiseView shifted(double eta) const;

  /// View-time node list for reduced integration over (0, h]: parent grid
  /// times strictly inside, then h itself as the final node.
  std::vector<double> segment_nodes(double h) const;

  /// Small events with view-time in (a, b], re-timed.
  std::vector<NoiseEvent> small_events_between(double a, double b) const;

  /// Large events with view-time in (a, b], re-timed.
  std::vector<NoiseEvent> large_events_between(double a, double b) const;

  Eigen::VectorXd increment_over(double a, double b) const;

 private:
  const NoiseRealization* base_;
  double offset_;
};

inline NoiseView shift_view(const NoiseRealization& noise, double eta) {
  return NoiseView(noise, eta);
}
inline NoiseView shift_view(const NoiseView& view, double eta) { return view.shifted(eta); }

/// Full-precision structured-text dump for cross-implementation replay.
std::string to_text(const NoiseRealization& noise);
NoiseRealization noise_from_text(const std::string& text);

}  // namespace hsde
