#include <doctest.h>

#include <cmath>

#include "hsde/noise.hpp"

using namespace hsde;

namespace {

Eigen::VectorXd vec1(double z) {
  Eigen::VectorXd v(1);
  v[0] = z;
  return v;
}

LevyModel small_only_model() {
  LevyModel m;
  m.dim = 1;
  m.small_atoms = {{vec1(-0.5), 1.0}, {vec1(0.5), 1.0}};
  return m;
}

LevyModel full_model(double large_rate = 2.0) {
  LevyModel m = small_only_model();
  m.large_rate = large_rate;
  m.large_sampler.kind = LargeMarkSampler::Kind::kUniformShell;
  m.large_sampler.shell_inner = 1.0;
  m.large_sampler.shell_outer = 2.0;
  return m;
}

}  // namespace

TEST_CASE("quiet model produces a pure Brownian realization") {
  LevyModel m;
  m.dim = 2;
  const NoiseRealization n = sample_noise(m, 1.0, 64, 3, 0);
  CHECK(n.small_events.empty());
  CHECK(n.large_events.empty());
  CHECK(n.brownian.cols() == 64);
  CHECK(n.brownian.allFinite());
}

TEST_CASE("identical keys reproduce the realization bit for bit") {
  const LevyModel m = full_model();
  const NoiseRealization a = sample_noise(m, 1.0, 128, 42, 7);
  const NoiseRealization b = sample_noise(m, 1.0, 128, 42, 7);
  CHECK(a.brownian == b.brownian);
  REQUIRE(a.small_events.size() == b.small_events.size());
  for (std::size_t i = 0; i < a.small_events.size(); ++i) {
    CHECK(a.small_events[i].time == b.small_events[i].time);
    CHECK(a.small_events[i].mark == b.small_events[i].mark);
  }
  REQUIRE(a.large_events.size() == b.large_events.size());
  for (std::size_t i = 0; i < a.large_events.size(); ++i)
    CHECK(a.large_events[i].time == b.large_events[i].time);

  const NoiseRealization c = sample_noise(m, 1.0, 128, 42, 8);
  CHECK(a.brownian != c.brownian);
}

TEST_CASE("event statistics sit inside the Poisson bands") {
  const LevyModel m = full_model(2.0);
  const int reps = 10000;
  double large_count = 0.0;
  double minus_count = 0.0, plus_count = 0.0;
  double brownian_sum_dot_events = 0.0, brownian_sum_acc = 0.0, events_acc = 0.0;
  double brownian_sq = 0.0, events_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const NoiseRealization n = sample_noise(m, 1.0, 8, 2024, static_cast<std::uint64_t>(r));
    large_count += static_cast<double>(n.large_events.size());
    for (const auto& e : n.small_events) (e.mark[0] < 0 ? minus_count : plus_count) += 1.0;
    for (const auto& e : n.large_events) CHECK(e.mark.norm() >= 1.0);
    const double bsum = n.brownian.sum();
    const double cnt = static_cast<double>(n.small_events.size() + n.large_events.size());
    brownian_sum_dot_events += bsum * cnt;
    brownian_sum_acc += bsum;
    events_acc += cnt;
    brownian_sq += bsum * bsum;
    events_sq += cnt * cnt;
  }
  const double band_large = 3.0 * std::sqrt(2.0 / reps);
  CHECK(std::abs(large_count / reps - 2.0) <= band_large);
  const double band_small = 3.0 * std::sqrt(1.0 / reps);
  CHECK(std::abs(minus_count / reps - 1.0) <= band_small);
  CHECK(std::abs(plus_count / reps - 1.0) <= band_small);

  // Independence surrogate: Brownian mass is uncorrelated with event counts.
  const double n = reps;
  const double cov = brownian_sum_dot_events / n - (brownian_sum_acc / n) * (events_acc / n);
  const double var_b = brownian_sq / n - (brownian_sum_acc / n) * (brownian_sum_acc / n);
  const double var_e = events_sq / n - (events_acc / n) * (events_acc / n);
  CHECK(std::abs(cov / std::sqrt(var_b * var_e)) <= 3.0 / std::sqrt(n));
}

TEST_CASE("event lists are strictly ordered with no cross-stream ties") {
  const LevyModel m = full_model(5.0);
  for (std::uint64_t r = 0; r < 500; ++r) {
    const NoiseRealization n = sample_noise(m, 1.0, 16, 77, r);
    for (std::size_t i = 1; i < n.small_events.size(); ++i)
      CHECK(n.small_events[i].time > n.small_events[i - 1].time);
    for (std::size_t i = 1; i < n.large_events.size(); ++i)
      CHECK(n.large_events[i].time > n.large_events[i - 1].time);
    for (const auto& l : n.large_events) {
      CHECK(l.time > 0.0);
      CHECK(l.time <= 1.0);
      for (const auto& s : n.small_events) CHECK(l.time != s.time);
    }
  }
}

TEST_CASE("compensator integral is the exact atom sum") {
  const LevyModel m = small_only_model();
  CHECK(compensator_integral(m, [](const Eigen::VectorXd&) { return 1.0; }) == 2.0);
  CHECK(compensator_integral(m, [](const Eigen::VectorXd& x) { return x.squaredNorm(); }) ==
        doctest::Approx(0.5).epsilon(1e-15));
  const Eigen::VectorXd v =
      compensator_integral_vec(m, [](const Eigen::VectorXd& x) { return 2.0 * x; });
  CHECK(v[0] == 0.0);  // odd atoms cancel
}

TEST_CASE("shift_view re-times events and composes exactly") {
  LevyModel m = small_only_model();
  NoiseRealization n = sample_noise(m, 1.0, 10, 5, 0);
  n.small_events = {{0.25, vec1(0.5)}, {0.7, vec1(-0.5)}};

  const NoiseView whole = shift_view(n, 0.0);
  CHECK(whole.horizon() == 1.0);
  CHECK(whole.small_events_between(0.0, 1.0).size() == 2);

  const NoiseView half = shift_view(n, 0.5);
  const auto evs = half.small_events_between(0.0, half.horizon());
  REQUIRE(evs.size() == 1);
  CHECK(evs[0].time == doctest::Approx(0.2).epsilon(1e-15));

  const NoiseView empty = shift_view(n, 1.0);
  CHECK(empty.horizon() == 0.0);
  CHECK(empty.small_events_between(0.0, 0.0).empty());

  const NoiseView ab = shift_view(shift_view(n, 0.3), 0.2);
  const NoiseView direct = shift_view(n, 0.3 + 0.2);
  CHECK(ab.offset() == direct.offset());

  CHECK_THROWS_AS(shift_view(n, 1.5), std::invalid_argument);
}

TEST_CASE("partial Brownian increments partition the stored columns") {
  const LevyModel m = small_only_model();
  const NoiseRealization n = sample_noise(m, 1.0, 8, 6, 0);
  const Eigen::VectorXd whole = n.increment_over(0.0, 1.0);
  CHECK((whole - n.brownian.rowwise().sum()).cwiseAbs().maxCoeff() <= 1e-15);

  for (double cut : {0.1, 0.37, 0.5, 0.93}) {
    const Eigen::VectorXd a = n.increment_over(0.0, cut);
    const Eigen::VectorXd b = n.increment_over(cut, 1.0);
    CHECK((a + b - whole).cwiseAbs().maxCoeff() <= 1e-13);
  }

  // Whole steps return the stored column exactly.
  CHECK(n.increment_over(n.grid_time(2), n.grid_time(3)) == n.brownian.col(2));
}

TEST_CASE("segment nodes walk the parent grid") {
  const LevyModel m = small_only_model();
  const NoiseRealization n = sample_noise(m, 1.0, 4, 8, 0);
  const auto full = shift_view(n, 0.0).segment_nodes(1.0);
  REQUIRE(full.size() == 4);
  CHECK(full[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(full.back() == 1.0);

  const auto part = shift_view(n, 0.3).segment_nodes(0.4);
  REQUIRE(part.size() == 2);  // parent grid point 0.5 plus the segment end
  CHECK(part[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(part[1] == 0.4);
}

TEST_CASE("coarsening halves the grid and sums increments") {
  const LevyModel m = full_model();
  const NoiseRealization n = sample_noise(m, 1.0, 16, 9, 0);
  const NoiseRealization c = coarsen_noise(n);
  CHECK(c.steps == 8);
  for (int k = 0; k < 8; ++k)
    CHECK(c.brownian.col(k) == (n.brownian.col(2 * k) + n.brownian.col(2 * k + 1)).eval());
  CHECK(c.small_events.size() == n.small_events.size());

  NoiseRealization odd = n;
  odd.steps = 15;
  odd.brownian = n.brownian.leftCols(15);
  CHECK_THROWS_AS(coarsen_noise(odd), std::invalid_argument);
}

TEST_CASE("noise dump round-trips at full precision") {
  const NoiseRealization n = sample_noise(full_model(), 1.0, 32, 10, 3);
  const NoiseRealization back = noise_from_text(to_text(n));
  CHECK(back.brownian == n.brownian);
  REQUIRE(back.small_events.size() == n.small_events.size());
  for (std::size_t i = 0; i < n.small_events.size(); ++i) {
    CHECK(back.small_events[i].time == n.small_events[i].time);
    CHECK(back.small_events[i].mark == n.small_events[i].mark);
  }
  REQUIRE(back.large_events.size() == n.large_events.size());
  for (std::size_t i = 0; i < n.large_events.size(); ++i)
    CHECK(back.large_events[i].time == n.large_events[i].time);
}

TEST_CASE("model validation reports field paths") {
  LevyModel m;
  m.dim = 1;
  m.small_atoms = {{vec1(1.5), 1.0}};
  CHECK_THROWS_WITH_AS(m.validate(),
                       "[levy] small_atoms[0]: mark must satisfy 0 < |x| < 1",
                       std::invalid_argument);
  m.small_atoms = {{vec1(0.5), -1.0}};
  CHECK_THROWS_WITH_AS(m.validate(), "[levy] small_atoms[0]: intensity must be > 0",
                       std::invalid_argument);
}
