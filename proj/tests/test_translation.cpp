#include <doctest.h>

#include <cmath>
#include <thread>

#include "hsde/rng.hpp"
#include "hsde/translation.hpp"

using namespace hsde;

namespace {

Eigen::VectorXd vec1(double z) {
  Eigen::VectorXd v(1);
  v[0] = z;
  return v;
}

ExpansionVector random_vec(int cutoff, double p, std::uint64_t seed) {
  CounterRng rng(seed, 0, 6);
  ExpansionVector y = zero_expansion(1, cutoff, p);
  for (int i = 0; i <= cutoff; ++i) y.coeffs[i] = rng.normal(static_cast<std::uint64_t>(i));
  return y;
}

// Mass of tau_z y that lands beyond the cutoff: re-translate on a wider
// basis and measure the tail. This is the truncation-tolerance oracle the
// round-trip and isometry bounds are checked against.
double tail_mass(const ExpansionVector& y, double z) {
  const int wide = y.cutoff + 16;
  const QuadratureRule rule = default_rule(wide, std::abs(z));
  const ExpansionVector ty = translate(pad_to_cutoff(y, wide), vec1(z), rule);
  double tail = 0.0;
  for (int i = y.cutoff + 1; i <= wide; ++i) tail += ty.coeffs[i] * ty.coeffs[i];
  return std::sqrt(tail);
}

}  // namespace

TEST_CASE("T(0) is the identity within 1e-12 and translate(y, 0) is exact") {
  const int cutoff = 16;
  const QuadratureRule rule = default_rule(cutoff);
  const auto set = MultiIndexSet::get(1, cutoff);
  const Eigen::MatrixXd t = translation_matrix(*set, vec1(0.0), rule);
  CHECK((t - Eigen::MatrixXd::Identity(set->size(), set->size())).cwiseAbs().maxCoeff() <= 1e-12);

  const ExpansionVector y = random_vec(cutoff, -1.0, 21);
  const ExpansionVector ty = translate(y, vec1(0.0), rule);
  for (int i = 0; i <= cutoff; ++i) CHECK(ty.coeffs[i] == y.coeffs[i]);
}

TEST_CASE("translated truncated delta reproduces point evaluation") {
  const int cutoff = 24;
  const QuadratureRule rule = default_rule(cutoff, 2.0);
  const ExpansionVector delta = delta0_expansion(1, cutoff, -1.0);
  CounterRng rng(23, 0, 7);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    ExpansionVector f = zero_expansion(1, cutoff, 1.0);
    for (int i = 0; i <= 8; ++i) f.coeffs[i] = rng.normal(static_cast<std::uint64_t>(s * 16 + i));
    f.coeffs /= f.coeffs.norm();
    for (double z : {-2.0, -1.0, -0.3, 0.6, 1.4, 2.0}) {
      const double got = dual_pair(f, translate(delta, vec1(z), rule));
      const double want = reconstruct(f, vec1(z));
      worst = std::max(worst, std::abs(got - want));
    }
  }
  // The cutoff-24 span carries an intrinsic reproduction floor near 3e-4 for
  // |z| <= 2 (it falls to ~7e-6 at cutoff 28); quadrature adds ~1e-11.
  CHECK(worst <= 5e-4);
  INFO("delta reproduction worst error: ", worst);
}

TEST_CASE("adjoint identity transfers the translation to the test function") {
  const int cutoff = 16;
  const QuadratureRule rule = default_rule(cutoff, 2.5);
  for (std::uint64_t s = 0; s < 25; ++s) {
    const ExpansionVector f = random_vec(cutoff, 1.0, 100 + s);
    const ExpansionVector y = random_vec(cutoff, -1.0, 200 + s);
    const double z = -2.5 + 5.0 * CounterRng(300 + s, 0, 8).uniform(0);
    const double lhs = dual_pair(f, translate(y, vec1(z), rule));
    const double rhs = dual_pair(translate(f, vec1(-z), rule), y);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("translation round-trip error is bounded by the tail-mass oracle") {
  const int cutoff = 16;
  const QuadratureRule rule = default_rule(cutoff, 2.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    ExpansionVector y = random_vec(cutoff, -1.0, 400 + s);
    y.coeffs /= y.coeffs.norm();
    for (double z : {0.5, 1.0, 2.0}) {
      const ExpansionVector back = translate(translate(y, vec1(z), rule), vec1(-z), rule);
      const double err = (back.coeffs - y.coeffs).norm();
      const double budget = 2.0 * tail_mass(y, z) + 1e-9;
      CHECK(err <= budget);
    }
  }
}

TEST_CASE("translation is continuous in the shift") {
  const int cutoff = 16;
  const QuadratureRule rule = default_rule(cutoff, 2.0);
  const ExpansionVector y = random_vec(cutoff, -1.0, 500);
  const double z = 0.8;
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const double gap =
        (translate(y, vec1(z + delta), rule).coeffs - translate(y, vec1(z), rule).coeffs).norm();
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("translation is an L2 isometry up to the truncation tail") {
  const int cutoff = 16;
  const QuadratureRule rule = default_rule(cutoff, 2.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    ExpansionVector y = random_vec(cutoff, 0.0, 600 + s);
    y.coeffs /= y.coeffs.norm();
    for (double z : {0.5, 1.5}) {
      const double drift = std::abs(norm_p(translate(y, vec1(z), rule), 0.0) - norm_p(y, 0.0));
      CHECK(drift <= tail_mass(y, z) + 1e-9);
    }
  }
}

TEST_CASE("operator norm profile: isometry at p = 0, polynomial envelope at p = 1") {
  const auto iso = translation_norm_profile(0.0, 1, 16, {0.0, 1.0, 2.0, 4.0});
  CHECK(std::abs(iso[0].second - 1.0) <= 1e-9);
  for (const auto& [r, est] : iso) CHECK(std::abs(est - 1.0) <= 0.05);

  const auto prof = translation_norm_profile(1.0, 1, 16, {0.0, 1.0, 2.0, 4.0});
  double c_fit = 0.0;
  for (int i = 0; i < 3; ++i)
    c_fit = std::max(c_fit, prof[static_cast<std::size_t>(i)].second /
                                std::pow(1.0 + prof[static_cast<std::size_t>(i)].first, 4.0));
  CHECK(prof[3].second <= c_fit * std::pow(1.0 + 4.0, 4.0));
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].second >= prof[i - 1].second);

  CHECK_THROWS_AS(translation_norm_profile(1.0, 1, 8, {-1.0}), std::invalid_argument);
}

TEST_CASE("translation cache returns the exact bits of a direct build") {
  const int cutoff = 10;
  const QuadratureRule rule = default_rule(cutoff, 3.0);
  const auto set = MultiIndexSet::get(1, cutoff);
  TranslationCache cache(set, rule, 4);

  const Eigen::MatrixXd direct = translation_matrix(*set, vec1(0.7), rule);
  const auto cached = cache.translation(vec1(0.7));
  CHECK(cached->rows() == direct.rows());
  for (Eigen::Index i = 0; i < direct.size(); ++i) CHECK((*cached)(i) == direct(i));

  CHECK(cache.misses() == 1);
  cache.translation(vec1(0.7));
  CHECK(cache.hits() == 1);

  // Capacity 4 evicts the oldest entry.
  for (double z : {0.1, 0.2, 0.3, 0.4}) cache.translation(vec1(z));
  cache.translation(vec1(0.7));
  CHECK(cache.misses() == 6);  // 0.7 was evicted and rebuilt

  // Concurrent reads and inserts stay consistent.
  std::vector<std::thread> pool;
  std::atomic<bool> ok{true};
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (int i = 0; i < 50; ++i) {
        const double z = 0.05 * ((w + i) % 7);
        const auto t = cache.translation(vec1(z));
        const Eigen::MatrixXd ref = translation_matrix(*set, vec1(z), rule);
        if ((*t - ref).cwiseAbs().maxCoeff() != 0.0) ok = false;
      }
    });
  for (auto& t : pool) t.join();
  CHECK(ok.load());
}

TEST_CASE("two-dimensional translation factorizes over axes") {
  const int cutoff = 6;
  const QuadratureRule rule = default_rule(cutoff, 1.5);
  const auto set2 = MultiIndexSet::get(2, cutoff);
  Eigen::VectorXd z(2);
  z << 0.9, -0.4;
  const Eigen::MatrixXd t2 = translation_matrix(*set2, z, rule);
  const Eigen::MatrixXd ta = translation_matrix_1d(cutoff, z[0], rule);
  const Eigen::MatrixXd tb = translation_matrix_1d(cutoff, z[1], rule);
  for (int i = 0; i < set2->size(); ++i)
    for (int j = 0; j < set2->size(); ++j) {
      const MultiIndex& m = set2->at(i);
      const MultiIndex& n = set2->at(j);
      CHECK(t2(i, j) == doctest::Approx(ta(m[0], n[0]) * tb(m[1], n[1])).epsilon(1e-14));
    }

  // Moving a product function along the first axis only touches that factor.
  ExpansionVector y = basis_expansion(MultiIndex(1, 2), cutoff, -1.0);
  Eigen::VectorXd zx(2);
  zx << 0.8, 0.0;
  const ExpansionVector ty = translate(y, zx, rule);
  const ExpansionVector y1 = basis_expansion(MultiIndex(1), cutoff, -1.0);
  const ExpansionVector ty1 = translate(y1, vec1(0.8), rule);
  for (int j = 0; j < set2->size(); ++j) {
    const MultiIndex& n = set2->at(j);
    const double want = n[1] == 2 && n[0] <= cutoff - 2 ? ty1.coeffs[n[0]] : 0.0;
    if (n[1] == 2 && n.order() <= cutoff && n[0] <= cutoff - 2)
      CHECK(ty.coeffs[j] == doctest::Approx(want).epsilon(1e-10));
  }
}
