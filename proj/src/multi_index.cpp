#include "hsde/multi_index.hpp"

#include <map>
#include <mutex>

namespace hsde {

std::shared_ptr<const MultiIndexSet> MultiIndexSet::get(int dim, int cutoff) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[{dim, cutoff}];
  if (!slot) slot = std::make_shared<MultiIndexSet>(dim, cutoff);
  return slot;
}

}  // namespace hsde
