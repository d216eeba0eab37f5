#pragma once

#include <cstdint>
#include <vector>

namespace driftgate {

/// Stratified k-fold assignment, deterministic in (seed, row_ids, strata) and
/// independent of row order: rows are ranked inside each stratum by a hash of
/// their id, then dealt round-robin. Stratum remainders rotate across folds so
/// fold sizes stay within one row of each other.
///
/// Returns one fold index in [0, k) per row position.
std::vector<int> assign_stratified_folds(const std::vector<std::int64_t>& row_ids,
                                         const std::vector<int>& strata,
                                         int k, std::uint64_t seed);

/// Same protocol with a single stratum.
std::vector<int> assign_folds(const std::vector<std::int64_t>& row_ids, int k,
                              std::uint64_t seed);

}  // namespace driftgate
