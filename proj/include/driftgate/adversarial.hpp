#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "driftgate/dataset.hpp"
#include "driftgate/gbdt.hpp"

namespace driftgate {

enum class Verdict { consistent, shifted };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// shifted iff adv_auc >= threshold.
Verdict shift_verdict(double adv_auc, double threshold);

struct AdversarialOptions {
  int k = 5;
  double threshold = 0.7;
  /// Fold-assignment / inner-split seed; defaults to the booster seed.
  std::optional<std::uint64_t> seed;
};

/// Outcome of origin cross-validation. per_row holds the out-of-fold
/// probability-of-being-test for every original training row; adv_auc pools
/// out-of-fold predictions over both sources.
struct AdversarialReport {
  double adv_auc = 0.0;
  double threshold = 0.7;
  Verdict verdict = Verdict::consistent;
  int k = 5;
  std::map<std::int64_t, double> per_row;          // train row id -> p(test)
  std::map<std::int64_t, int> fold_assignment;     // train row id -> fold
  std::map<std::int64_t, double> test_per_row;     // test row id -> p(test)
  std::map<std::int64_t, int> test_fold_assignment;

  /// Writes `<path>` (JSON) plus a `.csv` sidecar of (row_id, p_test, fold)
  /// for the training rows.
  void save(const std::string& json_path) const;
  static AdversarialReport load(const std::string& json_path);
};

/// Step one of origin testing: concatenate the two tables, drop any target,
/// and label rows by source (train 0, test 1). Feature schemas must match;
/// category dictionaries are unified. Original ids survive in `provenance`.
TabularDataset build_adversarial_dataset(const TabularDataset& train,
                                         const TabularDataset& test);

/// Stratified k-fold cross-validation on the origin label. Each fold's model
/// is trained with an inner early-stopping split and predicts only its
/// held-out rows, so probabilities are leak-free out-of-fold values.
/// Deterministic in (inputs, params, options); row order never matters
/// because folds are keyed on row ids.
AdversarialReport adversarial_validate(const TabularDataset& train,
                                       const TabularDataset& test,
                                       const BoostParams& params,
                                       const AdversarialOptions& options = {});

}  // namespace driftgate
