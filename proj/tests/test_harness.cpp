#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftgate/errors.hpp"
#include "driftgate/gbdt.hpp"
#include "driftgate/harness.hpp"
#include "driftgate/metrics.hpp"

using namespace driftgate;

namespace {

BoostParams grid_params() {
  BoostParams p;
  p.num_boost_round = 8;
  p.early_stopping_rounds = 0;
  p.min_data_in_leaf = 2;
  return p;
}

ShiftSpec small_spec(ShiftKind kind, double magnitude, std::uint64_t seed, int months = 6) {
  ShiftSpec spec;
  spec.kind = kind;
  spec.magnitude = magnitude;
  spec.n_train = 900;
  spec.n_test = 300;
  spec.n_features = 5;
  spec.seed = seed;
  spec.months = months;
  return spec;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// results.csv minus the runtime column, for determinism comparisons
std::string stable_csv(const std::string& dir) {
  std::ifstream in(dir + "/results.csv");
  REQUIRE(in.good());
  std::string line, out;
  while (std::getline(in, line)) {
    auto cut = line.rfind(',');
    out += line.substr(0, cut);
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("generate_shifted: deterministic and correctly stamped") {
  auto spec = small_spec(ShiftKind::covariate, 1.0, 5);
  auto [train1, test1] = generate_shifted(spec);
  auto [train2, test2] = generate_shifted(spec);
  CHECK(train1.numeric("f0").values == train2.numeric("f0").values);
  CHECK(*train1.labels == *train2.labels);
  CHECK(*train1.months == *train2.months);
  CHECK(test1.numeric("f3").values == test2.numeric("f3").values);

  CHECK(train1.n_rows() == 900);
  CHECK(test1.n_rows() == 300);
  CHECK((*train1.months).front() == MonthStamp{2018, 1});
  CHECK((*train1.months).back() == MonthStamp{2018, 6});
  CHECK((*test1.months).front() == MonthStamp{2018, 7});

  auto other_seed = generate_shifted(small_spec(ShiftKind::covariate, 1.0, 6));
  CHECK(other_seed.first.numeric("f0").values != train1.numeric("f0").values);
}

TEST_CASE("generate_shifted: spec validation") {
  ShiftSpec spec;
  spec.base_rate = 0.0;
  CHECK_THROWS_AS(generate_shifted(spec), ShiftSpecError);
  spec = ShiftSpec{};
  spec.magnitude = -1;
  CHECK_THROWS_AS(generate_shifted(spec), ShiftSpecError);
  spec = ShiftSpec{};
  spec.kind = ShiftKind::concept_shift;
  spec.n_features = 1;
  CHECK_THROWS_AS(generate_shifted(spec), ShiftSpecError);
  CHECK(shift_kind_from_string("concept") == ShiftKind::concept_shift);
  CHECK_THROWS_AS(shift_kind_from_string("weird"), ShiftSpecError);
}

TEST_CASE("generate_shifted: base rate is honored without shift") {
  auto spec = small_spec(ShiftKind::none, 0.0, 11);
  spec.n_train = 8000;
  spec.base_rate = 0.2;
  auto [train, test] = generate_shifted(spec);
  double rate = 0;
  for (auto l : *train.labels) rate += l;
  rate /= static_cast<double>(train.n_rows());
  CHECK(rate == doctest::Approx(0.2).epsilon(0.12));
  (void)test;
}

TEST_CASE("generate_shifted: prior shift moves the test positive rate by magnitude") {
  auto spec = small_spec(ShiftKind::prior_probability, 0.2, 13);
  spec.base_rate = 0.2;
  spec.n_test = 4000;
  auto [train, test] = generate_shifted(spec);
  double train_rate = 0, test_rate = 0;
  for (auto l : *train.labels) train_rate += l;
  for (auto l : *test.labels) test_rate += l;
  train_rate /= static_cast<double>(train.n_rows());
  test_rate /= static_cast<double>(test.n_rows());
  CHECK(train_rate == doctest::Approx(0.2).epsilon(0.15));
  CHECK(test_rate == doctest::Approx(0.4).epsilon(0.10));
}

TEST_CASE("generate_shifted: covariate shift moves test features, not labels given x") {
  auto spec = small_spec(ShiftKind::covariate, 2.0, 17, 1);
  spec.n_train = 3000;
  spec.n_test = 3000;
  auto [train, test] = generate_shifted(spec);

  // mean displacement along some direction must be visible
  double shift = 0;
  for (int j = 0; j < spec.n_features; ++j) {
    std::string name = "f" + std::to_string(j);
    double d = mean_of(test.numeric(name).values) - mean_of(train.numeric(name).values);
    shift += d * d;
  }
  CHECK(std::sqrt(shift) == doctest::Approx(2.0).epsilon(0.1));

  // both sides share P(y|x): models trained on either side rank a probe
  // sweep along the displacement direction the same way
  std::vector<double> dir(static_cast<std::size_t>(spec.n_features));
  double norm = 0;
  for (int j = 0; j < spec.n_features; ++j) {
    std::string name = "f" + std::to_string(j);
    dir[static_cast<std::size_t>(j)] =
        mean_of(test.numeric(name).values) - mean_of(train.numeric(name).values);
    norm += dir[static_cast<std::size_t>(j)] * dir[static_cast<std::size_t>(j)];
  }
  norm = std::sqrt(norm);
  TabularDataset probe;
  probe.schema = train.schema;
  probe.schema.month_column.reset();
  for (int j = 0; j < spec.n_features; ++j) {
    NumericColumn col{"f" + std::to_string(j), {}};
    for (int t = -10; t <= 10; ++t) {
      col.values.push_back(dir[static_cast<std::size_t>(j)] / norm * (t / 4.0));
    }
    probe.numeric_cols.push_back(std::move(col));
  }
  probe.row_ids.resize(21);
  for (int i = 0; i < 21; ++i) probe.row_ids[static_cast<std::size_t>(i)] = i;
  probe.check_consistent();

  BoostParams p = grid_params();
  p.num_boost_round = 30;
  auto along_probe = [&](const TabularDataset& fit_on) {
    auto model = fit(fit_on, nullptr, p);
    auto raw = model.predict_raw(probe);
    return raw.back() - raw.front();  // slope sign along the shift direction
  };
  double slope_train = along_probe(train);
  double slope_test = along_probe(test);
  CHECK(slope_train * slope_test > 0);  // same recovered direction sign
}

TEST_CASE("generate_shifted: selection bias skews only the training inputs") {
  auto spec = small_spec(ShiftKind::selection_bias, 2.0, 19, 1);
  spec.n_train = 4000;
  spec.n_test = 4000;
  auto [train, test] = generate_shifted(spec);
  CHECK(mean_of(train.numeric("f0").values) > 0.3);
  CHECK(std::abs(mean_of(test.numeric("f0").values)) < 0.1);
  CHECK(std::abs(mean_of(train.numeric("f1").values)) < 0.1);
}

TEST_CASE("run_grid: reduced grid produces 22 bookkept rows") {
  auto [train, test] = generate_shifted(small_spec(ShiftKind::covariate, 1.0, 23));
  GridConfig config;
  config.k = 3;
  config.seed = 9;
  config.set1_starts = std::vector<MonthStamp>{{2018, 1}, {2018, 2}, {2018, 3},
                                               {2018, 4}, {2018, 5}, {2018, 6}};
  config.set2_range_starts = std::vector<MonthStamp>{{2018, 1}};  // 5 later splits
  config.set3_weighted = true;
  config.set4_keep_fractions = std::vector<double>{1.0, 0.8, 0.6, 0.4, 0.2};
  config.set5_keep_fractions = std::vector<double>{1.0, 0.8, 0.6, 0.4, 0.2};

  auto report = run_grid(train, test, grid_params(), config);
  CHECK(report.rows.size() == 22);
  CHECK(report.set_counts == std::vector<std::size_t>{6, 5, 1, 5, 5});

  // keep=1.00 rows of sets 4/5 and the first-month chrono row share one plan
  double reference = report.rows[0].test_auc;  // set 1, start=2018-01
  for (const auto& row : report.rows) {
    if (row.param_tag == "keep=1.00") CHECK(row.test_auc == reference);
  }
  for (const auto& row : report.rows) {
    if (row.set_id >= 3) CHECK(row.adv_auc_used == report.rows.back().adv_auc_used);
    if (row.set_id <= 2) CHECK(std::isnan(row.adv_auc_used));
  }
}

TEST_CASE("run_grid: rerunning one set reproduces its rows bit for bit") {
  auto [train, test] = generate_shifted(small_spec(ShiftKind::covariate, 1.0, 29));
  GridConfig full;
  full.k = 3;
  full.seed = 4;
  full.set3_weighted = true;
  full.set4_keep_fractions = std::vector<double>{0.8, 0.5};
  full.set5_keep_fractions = std::vector<double>{0.8, 0.5};
  auto all_sets = run_grid(train, test, grid_params(), full);

  GridConfig only4;
  only4.k = 3;
  only4.seed = 4;
  only4.set4_keep_fractions = std::vector<double>{0.8, 0.5};
  auto just4 = run_grid(train, test, grid_params(), only4);

  REQUIRE(just4.rows.size() == 2);
  for (const auto& row : just4.rows) {
    bool matched = false;
    for (const auto& ref : all_sets.rows) {
      if (ref.set_id == 4 && ref.param_tag == row.param_tag) {
        CHECK(row.test_auc == ref.test_auc);
        CHECK(row.mean_valid_auc == ref.mean_valid_auc);
        CHECK(row.adv_auc_used == ref.adv_auc_used);
        matched = true;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("run_grid: paper shape on 18 months yields the 92-cell partition") {
  auto spec = small_spec(ShiftKind::covariate, 1.0, 31, 18);
  spec.n_train = 1080;
  auto [train, test] = generate_shifted(spec);
  GridConfig config;
  config.k = 3;
  config.paper_shape_requested = true;
  auto report = run_grid(train, test, grid_params(), config);
  CHECK(report.rows.size() == 92);
  CHECK(report.set_counts == std::vector<std::size_t>{18, 33, 1, 20, 20});
}

TEST_CASE("emit_report: files, determinism, empty error, best rows") {
  auto [train, test] = generate_shifted(small_spec(ShiftKind::covariate, 1.0, 37));
  GridConfig config;
  config.k = 3;
  config.set4_keep_fractions = std::vector<double>{1.0, 0.5};
  auto report = run_grid(train, test, grid_params(), config);

  emit_report(report, "dgtest_results_a");
  emit_report(report, "dgtest_results_b");
  CHECK(stable_csv("dgtest_results_a") == stable_csv("dgtest_results_b"));

  std::ifstream csv("dgtest_results_a/results.csv");
  std::string line;
  std::size_t lines = 0;
  std::getline(csv, line);
  CHECK(line ==
        "set_id,strategy_tag,param_tag,mean_valid_auc,test_auc,adv_auc_used,"
        "runtime_seconds");
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == report.rows.size());

  std::ifstream summary("dgtest_results_a/summary.json");
  std::stringstream buf;
  buf << summary.rdbuf();
  CHECK(buf.str().find("best_per_set") != std::string::npos);

  ExperimentReport empty;
  CHECK_THROWS_AS(emit_report(empty, "dgtest_results_c"), ContractError);

  for (const char* d : {"dgtest_results_a", "dgtest_results_b"}) {
    std::remove((std::string(d) + "/results.csv").c_str());
    std::remove((std::string(d) + "/summary.json").c_str());
    std::remove(d);
  }
}

TEST_CASE("grid config: json round-trip and paper-shape flag") {
  GridConfig config;
  config.k = 4;
  config.seed = 77;
  config.set1_starts = std::vector<MonthStamp>{{2018, 1}, {2018, 5}};
  config.set4_keep_fractions = std::vector<double>{0.9, 0.3};
  auto back = GridConfig::from_json_string(config.to_json_string());
  CHECK(back.k == 4);
  CHECK(back.seed == 77);
  REQUIRE(back.set1_starts.has_value());
  CHECK(back.set1_starts->size() == 2);
  CHECK_FALSE(back.set3_weighted);
  CHECK(back.set4_keep_fractions == config.set4_keep_fractions);

  auto shaped = GridConfig::from_json_string("{\"paper_shape\": true, \"k\": 5}");
  CHECK(shaped.paper_shape_requested);
}
