#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hsde {

// Spatial dimensions beyond 3 are out of scope for this library.
inline constexpr int kMaxDim = 3;

/// Multi-index n = (n_1,...,n_d) of non-negative integers, |n| = n_1+...+n_d.
struct MultiIndex {
  std::array<int, kMaxDim> entries{0, 0, 0};
  int dim = 1;

  MultiIndex() = default;
  explicit MultiIndex(int n0) : entries{n0, 0, 0}, dim(1) { validate(); }
  MultiIndex(int n0, int n1) : entries{n0, n1, 0}, dim(2) { validate(); }
  MultiIndex(int n0, int n1, int n2) : entries{n0, n1, n2}, dim(3) { validate(); }

  int order() const {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += entries[i];
    return s;
  }

  int operator[](int i) const { return entries[static_cast<std::size_t>(i)]; }

  bool operator==(const MultiIndex& o) const {
    return dim == o.dim && entries == o.entries;
  }

  void validate() const {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("MultiIndex: dim must be in [1,3]");
    for (int i = 0; i < dim; ++i)
      if (entries[static_cast<std::size_t>(i)] < 0)
        throw std::invalid_argument("MultiIndex: entries must be non-negative");
  }
};

/// Enumeration of all multi-indices with |n| <= cutoff in graded
/// lexicographic order. Coefficient vectors are aligned to this ordering.
class MultiIndexSet {
 public:
  MultiIndexSet(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("MultiIndexSet: dim must be in [1,3]");
    if (cutoff < 0) throw std::invalid_argument("MultiIndexSet: cutoff must be >= 0");
    for (int total = 0; total <= cutoff; ++total) enumerate_order(total);
    for (std::size_t i = 0; i < indices_.size(); ++i) pos_[key(indices_[i])] = static_cast<int>(i);
  }

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& at(int i) const { return indices_[static_cast<std::size_t>(i)]; }
  int order_of(int i) const { return indices_[static_cast<std::size_t>(i)].order(); }

  /// Position of a multi-index in the enumeration; -1 if |n| > cutoff.
  int index_of(const MultiIndex& n) const {
    if (n.dim != dim_) throw std::invalid_argument("MultiIndexSet: dimension mismatch");
    auto it = pos_.find(key(n));
    return it == pos_.end() ? -1 : it->second;
  }

  /// Shared, memoized set per (dim, cutoff). Safe for concurrent use.
  static std::shared_ptr<const MultiIndexSet> get(int dim, int cutoff);

 private:
  static std::uint32_t key(const MultiIndex& n) {
    return static_cast<std::uint32_t>(n.entries[0]) |
           (static_cast<std::uint32_t>(n.entries[1]) << 10) |
           (static_cast<std::uint32_t>(n.entries[2]) << 20);
  }

  void enumerate_order(int total) {
    if (dim_ == 1) {
      MultiIndex n(total);
      indices_.push_back(n);
      return;
    }
    if (dim_ == 2) {
      for (int a = total; a >= 0; --a) indices_.push_back(MultiIndex(a, total - a));
      return;
    }
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) indices_.push_back(MultiIndex(a, b, total - a - b));
  }

  int dim_;
  int cutoff_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<std::uint32_t, int> pos_;
};

}  // namespace hsde
