#pragma once

#include <cmath>
#include <cstdint>

namespace hsde {

// Counter-based generation: every variate is a pure function of
// (seed, replication, stream, counter), so sampling order and thread
// scheduling cannot change a realization.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream)
      : key_(mix64(mix64(mix64(seed) ^ replication) ^ (stream * 0xbf58476d1ce4e5b9ull))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ ^ (counter * 0x2545f4914f6cdd1dull));
  }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1p-53;
  }

  /// Standard normal via Box-Muller; consumes counters 2i and 2i+1.
  double normal(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double exponential(std::uint64_t counter, double rate) const {
    return -std::log(uniform(counter)) / rate;
  }

 private:
  std::uint64_t key_;
};

}  // namespace hsde
