#include "driftgate/folds.hpp"

#include <algorithm>
#include <map>

#include "driftgate/errors.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

std::vector<int> assign_stratified_folds(const std::vector<std::int64_t>& row_ids,
                                         const std::vector<int>& strata,
                                         int k, std::uint64_t seed) {
  if (k < 2) throw ContractError("fold count must be >= 2, got " + std::to_string(k));
  if (row_ids.size() != strata.size()) {
    throw ContractError("row_ids and strata lengths differ");
  }
  if (static_cast<std::size_t>(k) > row_ids.size()) {
    throw ContractError("fold count " + std::to_string(k) + " exceeds row count " +
                        std::to_string(row_ids.size()));
  }

  // stratum value -> positions, in stratum-value order for determinism
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < row_ids.size(); ++i) groups[strata[i]].push_back(i);

  std::vector<int> fold(row_ids.size(), -1);
  int offset = 0;
  for (auto& [value, positions] : groups) {
    (void)value;
    std::sort(positions.begin(), positions.end(),
              [&](std::size_t a, std::size_t b) {
                std::uint64_t ha = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(row_ids[a])));
                std::uint64_t hb = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(row_ids[b])));
                if (ha != hb) return ha < hb;
                return row_ids[a] < row_ids[b];
              });
    for (std::size_t r = 0; r < positions.size(); ++r) {
      fold[positions[r]] = static_cast<int>((r + offset) % k);
    }
    offset = static_cast<int>((offset + positions.size()) % k);
  }
  return fold;
}

std::vector<int> assign_folds(const std::vector<std::int64_t>& row_ids, int k,
                              std::uint64_t seed) {
  return assign_stratified_folds(row_ids, std::vector<int>(row_ids.size(), 0), k, seed);
}

}  // namespace driftgate
