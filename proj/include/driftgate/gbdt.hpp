#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftgate/dataset.hpp"

namespace driftgate {

/// Boosting hyperparameters. The first eight mirror the reference tuning for
/// this problem; the rest are plumbing defaults.
struct BoostParams {
  int num_boost_round = 50000;
  int early_stopping_rounds = 200;  // 0 disables early stopping
  double learning_rate = 0.1;
  int max_depth = 4;
  int num_leaves = 8;
  double colsample_bytree = 0.8;
  double subsample = 0.8;
  int subsample_freq = 3;  // rounds between bagging refreshes
  int min_data_in_leaf = 20;
  double l2_reg = 1.0;
  int max_bins = 255;
  std::uint64_t seed = 42;

  void validate() const;

  std::string to_json_string() const;
  static BoostParams from_json_string(const std::string& text);
  static BoostParams load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const BoostParams&) const = default;
};

/// One split or leaf. Numeric splits send `value <= threshold` left;
/// categorical splits send codes in `left_categories` left. Missing values
/// (and categories unseen by the training dictionary) follow `missing_left`.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  bool categorical = false;
  double threshold = 0.0;
  std::vector<std::int32_t> left_categories;  // sorted
  bool missing_left = false;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;  // shrinkage already applied
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const FeatureMatrixView& view, std::size_t row) const;
  int n_leaves() const;
  int depth() const;
};

class BoostedModel {
 public:
  std::vector<Tree> trees;
  double base_score = 0.0;      // log-odds of the weighted base rate
  int best_iteration = 0;       // prediction uses trees[0..best_iteration)
  std::vector<std::string> feature_names;
  std::vector<ColumnKind> feature_kinds;
  double learning_rate = 0.1;

  /// Per-row probability, strictly inside (0,1).
  std::vector<double> predict_score(const TabularDataset& ds) const;

  /// Log-odds scale; n_trees < 0 means best_iteration.
  std::vector<double> predict_raw(const TabularDataset& ds, int n_trees = -1) const;

  std::string to_json_string() const;
  static BoostedModel from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static BoostedModel load(const std::string& path);
};

/// Trains a binary logistic GBDT with histogram split finding, leaf-wise
/// growth under max_depth/num_leaves, native categorical splits, learned
/// missing directions, row/feature subsampling and optional AUC early
/// stopping on `valid`. Deterministic for fixed inputs and seed.
BoostedModel fit(const TabularDataset& train, const TabularDataset* valid,
                 const BoostParams& params, std::span<const double> weights = {});

std::vector<double> predict_score(const BoostedModel& model, const TabularDataset& ds);

/// Total split gain per feature over the first best_iteration trees; features
/// never split map to 0.
std::map<std::string, double> feature_importance(const BoostedModel& model);

}  // namespace driftgate
