#pragma once

#include <Eigen/Dense>
#include <list>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "hsde/expansion.hpp"

namespace hsde {

/// One-axis translation matrix T(z)[m,n] = <tau_z h_m, h_n> =
/// int h_m(u - z) h_n(u) du, computed by quadrature.
Eigen::MatrixXd translation_matrix_1d(int cutoff, double z, const QuadratureRule& rule);

/// d-dimensional translation matrix on the |n| <= cutoff basis. The
/// tensor-product quadrature factorizes over axes, so this is assembled from
/// the per-axis one-dimensional matrices.
Eigen::MatrixXd translation_matrix(const MultiIndexSet& set, const Eigen::VectorXd& z,
                                   const QuadratureRule& rule);

/// Coefficients of tau_z y: (tau_z y)[n] = sum_m y[m] T(z)[m,n].
ExpansionVector translate(const ExpansionVector& y, const Eigen::VectorXd& z,
                          const QuadratureRule& rule);

/// Bounded LRU memo of T(z) per distinct z. Coefficient evaluation inside the
/// solvers is the hot loop; within one step the drift, diffusion and jump
/// lifts all revisit the same z. Reads and inserts are internally
/// synchronized so evaluators can be shared across threads.
class TranslationCache {
 public:
  TranslationCache(std::shared_ptr<const MultiIndexSet> set, QuadratureRule rule,
                   std::size_t capacity = 1024);

  std::shared_ptr<const Eigen::MatrixXd> translation(const Eigen::VectorXd& z) const;

  const QuadratureRule& rule() const { return rule_; }
  const MultiIndexSet& set() const { return *set_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  struct Key {
    std::vector<std::uint64_t> bits;
    bool operator==(const Key& o) const { return bits == o.bits; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 0x9e3779b97f4a7c15ull;
      for (auto b : k.bits) h = (h ^ b) * 0x100000001b3ull;
      return h;
    }
  };
  using Entry = std::pair<Key, std::shared_ptr<const Eigen::MatrixXd>>;

  std::shared_ptr<const MultiIndexSet> set_;
  QuadratureRule rule_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::list<Entry> lru_;
  mutable std::unordered_map<Key, std::list<Entry>::iterator, KeyHash> map_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Estimated operator norm of tau_z on the truncated S_p span at each radius,
/// by power iteration on the p-weighted normal matrix. Radii are probed along
/// the first coordinate axis. The output is monotone data suitable for
/// fitting a polynomial bound C (1+r)^k with k = 2(floor(|p|)+1).
std::vector<std::pair<double, double>> translation_norm_profile(double p, int dim, int cutoff,
                                                                const std::vector<double>& radii);

}  // namespace hsde
