#include "hsde/translation.hpp"

#include <cmath>
#include <cstring>

#include "hsde/hermite.hpp"

namespace hsde {

Eigen::MatrixXd translation_matrix_1d(int cutoff, double z, const QuadratureRule& rule) {
  rule.require_nodes_for(cutoff);
  const Eigen::VectorXd shifted = rule.nodes.array() - z;
  const Eigen::MatrixXd hm = hermite_table<double>(cutoff, shifted);  // h_m(u - z)
  const Eigen::MatrixXd hn = hermite_table<double>(cutoff, rule.nodes);
  return hm.transpose() * rule.weights.asDiagonal() * hn;
}

Eigen::MatrixXd translation_matrix(const MultiIndexSet& set, const Eigen::VectorXd& z,
                                   const QuadratureRule& rule) {
  if (z.size() != set.dim()) throw std::invalid_argument("translation_matrix: dimension mismatch");
  if (set.dim() == 1) return translation_matrix_1d(set.cutoff(), z[0], rule);

  std::vector<Eigen::MatrixXd> axis;
  axis.reserve(static_cast<std::size_t>(set.dim()));
  for (int a = 0; a < set.dim(); ++a)
    axis.push_back(translation_matrix_1d(set.cutoff(), z[a], rule));

  const int n = set.size();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const MultiIndex& m = set.at(i);
    for (int j = 0; j < n; ++j) {
      const MultiIndex& k = set.at(j);
      double v = 1.0;
      for (int a = 0; a < set.dim(); ++a) v *= axis[static_cast<std::size_t>(a)](m[a], k[a]);
      out(i, j) = v;
    }
  }
  return out;
}

ExpansionVector translate(const ExpansionVector& y, const Eigen::VectorXd& z,
                          const QuadratureRule& rule) {
  if (z.isZero(0.0)) return y;  // tau_0 is the identity
  const Eigen::MatrixXd t = translation_matrix(*y.basis, z, rule);
  ExpansionVector out(y.dim, y.cutoff, y.regularity);
  out.coeffs = t.transpose() * y.coeffs;
  return out;
}

TranslationCache::TranslationCache(std::shared_ptr<const MultiIndexSet> set, QuadratureRule rule,
                                   std::size_t capacity)
    : set_(std::move(set)), rule_(std::move(rule)), capacity_(capacity == 0 ? 1 : capacity) {}

std::shared_ptr<const Eigen::MatrixXd> TranslationCache::translation(
    const Eigen::VectorXd& z) const {
  Key key;
  key.bits.resize(static_cast<std::size_t>(z.size()));
  std::memcpy(key.bits.data(), z.data(), sizeof(double) * static_cast<std::size_t>(z.size()));

  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return it->second->second;
    }
  }

  // Build outside the lock; duplicate concurrent builds of the same z are
  // harmless since the value is a pure function of z.
  auto mat = std::make_shared<const Eigen::MatrixXd>(translation_matrix(*set_, z, rule_));

  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  ++misses_;
  lru_.emplace_front(key, mat);
  map_[key] = lru_.begin();
  if (map_.size() > capacity_) {
    map_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return mat;
}

std::vector<std::pair<double, double>> translation_norm_profile(double p, int dim, int cutoff,
                                                                const std::vector<double>& radii) {
  auto set = MultiIndexSet::get(dim, cutoff);
  double zmax = 0.0;
  for (double r : radii) {
    if (r < 0) throw std::invalid_argument("translation_norm_profile: radii must be >= 0");
    zmax = std::max(zmax, r);
  }
  const QuadratureRule rule = default_rule(cutoff, zmax);

  Eigen::VectorXd weight(set->size());
  for (int i = 0; i < set->size(); ++i)
    weight[i] = std::pow(2.0 * set->order_of(i) + dim, p);

  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  for (double r : radii) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
    z[0] = r;
    const Eigen::MatrixXd t = translation_matrix(*set, z, rule);
    // A = D T^T D^{-1} maps weighted coefficients; its spectral norm is the
    // operator norm of tau_z on the truncated span of S_p.
    const Eigen::MatrixXd a =
        weight.asDiagonal() * t.transpose() * weight.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd ata = a.transpose() * a;

    Eigen::VectorXd v = Eigen::VectorXd::Constant(set->size(), 1.0 / std::sqrt(set->size()));
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd w = ata * v;
      const double nw = w.norm();
      if (nw == 0.0) {
        lambda = 0.0;
        break;
      }
      w /= nw;
      const double next = w.dot(ata * w);
      const bool done = std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next));
      lambda = next;
      v = w;
      if (done && it > 2) break;
    }
    out.emplace_back(r, std::sqrt(std::max(0.0, lambda)));
  }
  return out;
}

}  // namespace hsde
