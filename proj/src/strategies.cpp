#include "driftgate/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "driftgate/errors.hpp"
#include "driftgate/folds.hpp"
#include "driftgate/metrics.hpp"

namespace driftgate {

using nlohmann::json;

namespace {

std::string keep_tag(double keep_fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "keep=%.2f", keep_fraction);
  return buf;
}

// Folds the given row positions of `train`, stratified on the credit label.
std::vector<PlanFold> make_cv_folds(const TabularDataset& train,
                                    const std::vector<std::size_t>& positions, int k,
                                    std::uint64_t seed) {
  if (!train.labels) throw ContractError("cross-validation plans need labels");
  std::vector<std::int64_t> ids(positions.size());
  std::vector<int> strata(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    ids[i] = train.row_ids[positions[i]];
    strata[i] = (*train.labels)[positions[i]];
  }
  std::vector<int> fold = assign_stratified_folds(ids, strata, k, seed);

  std::vector<PlanFold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      auto& pf = folds[static_cast<std::size_t>(f)];
      (fold[i] == f ? pf.valid_rows : pf.train_rows).push_back(ids[i]);
    }
  }
  for (auto& f : folds) {
    std::sort(f.train_rows.begin(), f.train_rows.end());
    std::sort(f.valid_rows.begin(), f.valid_rows.end());
    if (f.valid_rows.empty()) throw ContractError("a fold has no validation rows");
  }
  return folds;
}

std::vector<std::size_t> all_positions(const TabularDataset& ds) {
  std::vector<std::size_t> pos(ds.n_rows());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  return pos;
}

void check_report_coverage(const TabularDataset& train, const AdversarialReport& report) {
  std::vector<std::int64_t> missing;
  for (auto id : train.row_ids) {
    if (!report.per_row.count(id)) {
      missing.push_back(id);
      if (missing.size() >= 5) break;
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (auto id : missing) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw ContractError("adversarial report does not cover row ids: " + ids +
                        (missing.size() >= 5 ? ", ..." : ""));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// plan builders
// ---------------------------------------------------------------------------

TrainingPlan baseline_cv_plan(const TabularDataset& train, int k, std::uint64_t seed) {
  if (train.n_rows() == 0) throw EmptyInputError("empty training data");
  TrainingPlan plan;
  plan.folds = make_cv_folds(train, all_positions(train), k, seed);
  plan.strategy_tag = "baseline";
  plan.param_tag = "all";
  return plan;
}

TrainingPlan chrono_cv_plan(const TabularDataset& train, MonthStamp start, int k,
                            std::uint64_t seed) {
  if (!train.months) throw SchemaError("chrono-cv plan needs month stamps");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    if (!((*train.months)[i] < start)) keep.push_back(i);
  }
  if (keep.empty()) {
    throw EmptySelectionError("no rows at or after " + start.str());
  }
  TrainingPlan plan;
  plan.folds = make_cv_folds(train, keep, k, seed);
  plan.strategy_tag = "chrono-cv";
  plan.param_tag = "start=" + start.str();
  return plan;
}

TrainingPlan chrono_holdout_plan(const TabularDataset& train, MonthStamp range_start,
                                 MonthStamp valid_start) {
  if (!train.months) throw SchemaError("chrono-holdout plan needs month stamps");
  if (!(range_start < valid_start)) {
    throw ContractError("range_start must precede valid_start");
  }
  PlanFold fold;
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    MonthStamp m = (*train.months)[i];
    if (m < range_start) continue;
    (m < valid_start ? fold.train_rows : fold.valid_rows).push_back(train.row_ids[i]);
  }
  if (fold.train_rows.empty()) {
    throw EmptySelectionError("no training rows in [" + range_start.str() + ", " +
                              valid_start.str() + ")");
  }
  if (fold.valid_rows.empty()) {
    throw EmptySelectionError("no validation rows at or after " + valid_start.str());
  }
  std::sort(fold.train_rows.begin(), fold.train_rows.end());
  std::sort(fold.valid_rows.begin(), fold.valid_rows.end());

  TrainingPlan plan;
  plan.folds.push_back(std::move(fold));
  plan.strategy_tag = "chrono-holdout";
  plan.param_tag = "range=" + range_start.str() + ",valid=" + valid_start.str();
  return plan;
}

TrainingPlan weighted_plan(const TabularDataset& train, const AdversarialReport& report,
                           int k, std::uint64_t seed) {
  check_report_coverage(train, report);
  TrainingPlan plan = baseline_cv_plan(train, k, seed);
  std::map<std::int64_t, double> weights;
  for (auto id : train.row_ids) weights[id] = report.per_row.at(id);
  plan.weights = std::move(weights);
  plan.strategy_tag = "weighted";
  plan.param_tag = "p-hat";
  return plan;
}

std::vector<std::int64_t> select_top_rows(const TabularDataset& train,
                                          const AdversarialReport& report,
                                          double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw ContractError("keep_fraction must be in (0,1]");
  }
  check_report_coverage(train, report);
  const std::size_t n = train.n_rows();
  // ceil(keep * n); the 1e-9 slack absorbs double rounding like 0.1*10.
  auto take = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(n) - 1e-9));
  take = std::min(std::max<std::size_t>(take, 1), n);

  std::vector<std::int64_t> ids = train.row_ids;
  std::sort(ids.begin(), ids.end(), [&](std::int64_t a, std::int64_t b) {
    double pa = report.per_row.at(a), pb = report.per_row.at(b);
    if (pa != pb) return pa > pb;
    return a < b;
  });
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

TrainingPlan filtered_cv_plan(const TabularDataset& train, const AdversarialReport& report,
                              double keep_fraction, int k, std::uint64_t seed) {
  auto kept = select_top_rows(train, report, keep_fraction);
  if (kept.size() < static_cast<std::size_t>(k)) {
    throw ContractError("retained set of " + std::to_string(kept.size()) +
                        " rows is smaller than k=" + std::to_string(k));
  }
  auto positions = train.positions_of(kept);
  TrainingPlan plan;
  plan.folds = make_cv_folds(train, positions, k, seed);
  plan.strategy_tag = "filtered";
  plan.param_tag = keep_tag(keep_fraction);
  return plan;
}

TrainingPlan augmented_cv_plan(const TabularDataset& train, const AdversarialReport& report,
                               double keep_fraction, int k, std::uint64_t seed) {
  TrainingPlan plan = filtered_cv_plan(train, report, keep_fraction, k, seed);
  std::set<std::int64_t> kept(plan.folds.front().train_rows.begin(),
                              plan.folds.front().train_rows.end());
  kept.insert(plan.folds.front().valid_rows.begin(), plan.folds.front().valid_rows.end());
  std::vector<std::int64_t> rest;
  for (auto id : train.row_ids) {
    if (!kept.count(id)) rest.push_back(id);
  }
  for (auto& fold : plan.folds) {
    fold.train_rows.insert(fold.train_rows.end(), rest.begin(), rest.end());
    std::sort(fold.train_rows.begin(), fold.train_rows.end());
  }
  plan.strategy_tag = "augmented";
  plan.param_tag = keep_tag(keep_fraction);
  return plan;
}

// ---------------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------------

StrategyOutcome execute_plan(const TrainingPlan& plan, const TabularDataset& train,
                             const TabularDataset& test, const BoostParams& params) {
  if (plan.folds.empty()) throw ContractError("plan has no folds");
  if (!test.labels) throw ContractError("test data has no labels");

  StrategyOutcome outcome;
  outcome.plan = plan;
  std::vector<double> test_sum(test.n_rows(), 0.0);

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const auto& fold = plan.folds[f];
    TabularDataset fold_train = train.select_rows(train.positions_of(fold.train_rows));
    TabularDataset fold_valid = train.select_rows(train.positions_of(fold.valid_rows));

    std::vector<double> weights;
    if (plan.weights) {
      weights.reserve(fold_train.n_rows());
      for (auto id : fold_train.row_ids) {
        auto it = plan.weights->find(id);
        if (it == plan.weights->end()) {
          throw ContractError("plan weights missing row id " + std::to_string(id));
        }
        weights.push_back(it->second);
      }
    }

    BoostedModel model;
    try {
      model = fit(fold_train, &fold_valid, params, weights);
    } catch (const DegenerateLabelError& e) {
      throw FoldError(static_cast<int>(f), e.what());
    }

    double fold_auc = auc(*fold_valid.labels, model.predict_raw(fold_valid));
    outcome.per_fold_valid_auc.push_back(fold_auc);

    auto p = model.predict_score(test);
    for (std::size_t i = 0; i < test_sum.size(); ++i) test_sum[i] += p[i];
    outcome.models.push_back(std::move(model));
  }

  double sum = 0;
  for (double a : outcome.per_fold_valid_auc) sum += a;
  outcome.mean_valid_auc = sum / static_cast<double>(outcome.per_fold_valid_auc.size());

  for (double& v : test_sum) v /= static_cast<double>(plan.folds.size());
  outcome.test_auc = auc(*test.labels, test_sum);
  return outcome;
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

void TrainingPlan::save(const std::string& path) const {
  json jfolds = json::array();
  for (const auto& f : folds) {
    jfolds.push_back({{"train_rows", f.train_rows}, {"valid_rows", f.valid_rows}});
  }
  json j{{"format", "driftgate.plan.v1"},
         {"strategy_tag", strategy_tag},
         {"param_tag", param_tag},
         {"folds", jfolds}};
  if (weights) {
    std::vector<std::int64_t> ids;
    std::vector<double> values;
    ids.reserve(weights->size());
    for (const auto& [id, w] : *weights) {
      ids.push_back(id);
      values.push_back(w);
    }
    j["weights"] = {{"row_ids", ids}, {"values", values}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write plan file '" + path + "'");
  out << j.dump() << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

TrainingPlan TrainingPlan::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open plan file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("plan file '" + path + "': " + e.what());
  }
  if (j.value("format", std::string()) != "driftgate.plan.v1") {
    throw ParseError("'" + path + "' is not a plan file");
  }
  TrainingPlan plan;
  plan.strategy_tag = j.value("strategy_tag", std::string());
  plan.param_tag = j.value("param_tag", std::string());
  for (const auto& f : j.at("folds")) {
    PlanFold fold;
    fold.train_rows = f.at("train_rows").get<std::vector<std::int64_t>>();
    fold.valid_rows = f.at("valid_rows").get<std::vector<std::int64_t>>();
    plan.folds.push_back(std::move(fold));
  }
  if (j.contains("weights")) {
    auto ids = j["weights"].at("row_ids").get<std::vector<std::int64_t>>();
    auto values = j["weights"].at("values").get<std::vector<double>>();
    if (ids.size() != values.size()) throw ParseError("plan weights arrays differ in length");
    std::map<std::int64_t, double> w;
    for (std::size_t i = 0; i < ids.size(); ++i) w[ids[i]] = values[i];
    plan.weights = std::move(w);
  }
  return plan;
}

void StrategyOutcome::save(const std::string& path) const {
  json j{{"format", "driftgate.outcome.v1"},
         {"strategy_tag", plan.strategy_tag},
         {"param_tag", plan.param_tag},
         {"n_folds", plan.folds.size()},
         {"per_fold_valid_auc", per_fold_valid_auc},
         {"mean_valid_auc", mean_valid_auc},
         {"test_auc", test_auc}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write outcome file '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace driftgate
