#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driftgate/adversarial.hpp"
#include "driftgate/dataset.hpp"
#include "driftgate/gbdt.hpp"
#include "driftgate/month.hpp"

namespace driftgate {

struct PlanFold {
  std::vector<std::int64_t> train_rows;  // sorted row ids
  std::vector<std::int64_t> valid_rows;  // sorted, disjoint from train_rows

  bool operator==(const PlanFold&) const = default;
};

/// The unit every strategy produces and the executor consumes: per-fold
/// train/validation row-id sets, plus optional per-row fit weights.
struct TrainingPlan {
  std::vector<PlanFold> folds;
  std::optional<std::map<std::int64_t, double>> weights;
  std::string strategy_tag;
  std::string param_tag;

  bool operator==(const TrainingPlan&) const = default;

  void save(const std::string& path) const;
  static TrainingPlan load(const std::string& path);
};

struct StrategyOutcome {
  std::vector<double> per_fold_valid_auc;
  double mean_valid_auc = 0.0;
  double test_auc = 0.0;
  std::vector<BoostedModel> models;
  TrainingPlan plan;

  void save(const std::string& path) const;  // AUCs + tags, not the models
};

/// Stratified k-fold over all rows.
TrainingPlan baseline_cv_plan(const TabularDataset& train, int k, std::uint64_t seed);

/// Drops rows before `start`, then k-folds the remainder. With start equal to
/// the earliest month this matches baseline_cv_plan exactly.
TrainingPlan chrono_cv_plan(const TabularDataset& train, MonthStamp start, int k,
                            std::uint64_t seed);

/// Single fold: train on [range_start, valid_start), validate on
/// [valid_start, end of data].
TrainingPlan chrono_holdout_plan(const TabularDataset& train, MonthStamp range_start,
                                 MonthStamp valid_start);

/// Baseline folds with the adversarial probability of each row as its fit
/// weight.
TrainingPlan weighted_plan(const TabularDataset& train, const AdversarialReport& report,
                           int k, std::uint64_t seed);

/// The ceil(keep_fraction * n) rows most similar to the test set, highest
/// p_test first; p_test ties broken by ascending row id. Sorted by id.
std::vector<std::int64_t> select_top_rows(const TabularDataset& train,
                                          const AdversarialReport& report,
                                          double keep_fraction);

/// k-fold CV over only the top keep_fraction most test-like rows; everything
/// else is absent from the plan.
TrainingPlan filtered_cv_plan(const TabularDataset& train, const AdversarialReport& report,
                              double keep_fraction, int k, std::uint64_t seed);

/// Top keep_fraction rows are k-folded; the remaining rows join every fold's
/// training side and never appear in validation.
TrainingPlan augmented_cv_plan(const TabularDataset& train, const AdversarialReport& report,
                               double keep_fraction, int k, std::uint64_t seed);

/// Fits one model per fold (early stopping on the fold's validation rows,
/// plan weights applied to training only), scores the test set with the
/// arithmetic mean of the fold models' probabilities.
StrategyOutcome execute_plan(const TrainingPlan& plan, const TabularDataset& train,
                             const TabularDataset& test, const BoostParams& params);

}  // namespace driftgate
