#include "driftgate/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "driftgate/errors.hpp"
#include "driftgate/rng.hpp"
#include "driftgate/strategies.hpp"

namespace driftgate {

using nlohmann::json;

namespace {

// Population signal scale ||w||; chosen so the base learner lands in the
// credit-scoring AUC regime (~0.75) at desk-scale sample sizes.
constexpr double kSignalNorm = 1.25;
constexpr double kPi = 3.14159265358979323846;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// E[sigmoid(sigma * z + b)] over z ~ N(0,1), by trapezoid on [-8, 8].
double mean_positive_rate(double sigma, double b) {
  constexpr int kSteps = 2000;
  constexpr double kLo = -8.0, kHi = 8.0;
  const double dz = (kHi - kLo) / kSteps;
  double acc = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    double z = kLo + dz * i;
    double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
    double v = sigmoid(sigma * z + b) * pdf;
    acc += (i == 0 || i == kSteps) ? 0.5 * v : v;
  }
  return acc * dz;
}

double solve_intercept(double sigma, double target_rate) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (mean_positive_rate(sigma, mid) < target_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// ShiftSpec
// ---------------------------------------------------------------------------

std::string to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::none: return "none";
    case ShiftKind::covariate: return "covariate";
    case ShiftKind::prior_probability: return "prior_probability";
    case ShiftKind::concept_shift: return "concept";
    case ShiftKind::selection_bias: return "selection_bias";
  }
  return "none";
}

ShiftKind shift_kind_from_string(const std::string& s) {
  if (s == "none") return ShiftKind::none;
  if (s == "covariate") return ShiftKind::covariate;
  if (s == "prior_probability" || s == "prior") return ShiftKind::prior_probability;
  if (s == "concept" || s == "concept_shift") return ShiftKind::concept_shift;
  if (s == "selection_bias" || s == "selection") return ShiftKind::selection_bias;
  throw ShiftSpecError("unknown shift kind '" + s + "'");
}

void ShiftSpec::validate() const {
  if (n_train == 0 || n_test == 0) throw ShiftSpecError("n_train and n_test must be positive");
  if (n_features < 1) throw ShiftSpecError("n_features must be >= 1");
  if (kind == ShiftKind::concept_shift && n_features < 2) {
    throw ShiftSpecError("concept shift needs at least 2 features");
  }
  if (!(base_rate > 0.0 && base_rate < 1.0)) throw ShiftSpecError("base_rate must be in (0,1)");
  if (magnitude < 0) throw ShiftSpecError("magnitude must be >= 0");
  if (months < 1) throw ShiftSpecError("months must be >= 1");
}

// ---------------------------------------------------------------------------
// generate_shifted
// ---------------------------------------------------------------------------

namespace {

struct Generator {
  const ShiftSpec& spec;
  std::vector<double> w;       // ||w|| = kSignalNorm
  std::vector<double> w_unit;  // covariate shift direction
  std::vector<double> ortho;   // rotation partner for concept shift
  double intercept = 0.0;

  explicit Generator(const ShiftSpec& s) : spec(s) {
    const int d = spec.n_features;
    Rng wrng(splitmix64(spec.seed ^ 0x57454947485453ULL));
    w.resize(d);
    double norm = 0.0;
    for (auto& v : w) {
      v = wrng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      w.assign(d, 0.0);
      w[0] = 1.0;
      norm = 1.0;
    }
    for (auto& v : w) v *= kSignalNorm / norm;
    w_unit.resize(d);
    for (int j = 0; j < d; ++j) w_unit[j] = w[j] / kSignalNorm;
    intercept = solve_intercept(kSignalNorm, spec.base_rate);

    if (spec.kind == ShiftKind::concept_shift) {
      // Unit vector orthogonal to w: start from the axis least aligned with w.
      int axis = 0;
      for (int j = 1; j < d; ++j) {
        if (std::abs(w_unit[j]) < std::abs(w_unit[axis])) axis = j;
      }
      ortho.assign(d, 0.0);
      ortho[axis] = 1.0;
      double dot = w_unit[axis];
      double onorm = 0.0;
      for (int j = 0; j < d; ++j) {
        ortho[j] -= dot * w_unit[j];
        onorm += ortho[j] * ortho[j];
      }
      onorm = std::sqrt(onorm);
      for (auto& v : ortho) v /= onorm;
    }
  }

  std::vector<double> rotated_w(double angle) const {
    std::vector<double> out(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      out[j] = std::cos(angle) * w[j] + std::sin(angle) * kSignalNorm * ortho[j];
    }
    return out;
  }

  // drift_frac: 0 = base distribution, 1 = the fully shifted test distribution.
  void draw_row(Rng& rng, double drift_frac, bool is_train, std::vector<double>& x,
                std::int8_t& y) const {
    const int d = spec.n_features;
    x.resize(d);
    const double shift = spec.magnitude * drift_frac;
    switch (spec.kind) {
      case ShiftKind::none:
      case ShiftKind::covariate: {
        for (int j = 0; j < d; ++j) x[j] = rng.normal();
        if (spec.kind == ShiftKind::covariate) {
          for (int j = 0; j < d; ++j) x[j] += shift * w_unit[j];
        }
        double s = intercept;
        for (int j = 0; j < d; ++j) s += w[j] * x[j];
        y = rng.bernoulli(sigmoid(s)) ? 1 : 0;
        return;
      }
      case ShiftKind::concept_shift: {
        for (int j = 0; j < d; ++j) x[j] = rng.normal();
        auto weff = rotated_w(shift);
        double s = intercept;
        for (int j = 0; j < d; ++j) s += weff[j] * x[j];
        y = rng.bernoulli(sigmoid(s)) ? 1 : 0;
        return;
      }
      case ShiftKind::prior_probability: {
        if (is_train || drift_frac == 0.0) {
          for (int j = 0; j < d; ++j) x[j] = rng.normal();
          double s = intercept;
          for (int j = 0; j < d; ++j) s += w[j] * x[j];
          y = rng.bernoulli(sigmoid(s)) ? 1 : 0;
          return;
        }
        double rate = std::clamp(spec.base_rate + spec.magnitude, 0.01, 0.99);
        y = rng.bernoulli(rate) ? 1 : 0;
        // Rejection keeps P(x|y) identical to the base process.
        for (int attempt = 0; attempt < 100000; ++attempt) {
          for (int j = 0; j < d; ++j) x[j] = rng.normal();
          double s = intercept;
          for (int j = 0; j < d; ++j) s += w[j] * x[j];
          double p = sigmoid(s);
          if (rng.uniform01() < (y ? p : 1.0 - p)) return;
        }
        throw ShiftSpecError("rejection sampling for prior shift did not converge");
      }
      case ShiftKind::selection_bias: {
        if (!is_train || spec.magnitude == 0.0) {
          for (int j = 0; j < d; ++j) x[j] = rng.normal();
        } else {
          bool accepted = false;
          for (int attempt = 0; attempt < 100000 && !accepted; ++attempt) {
            for (int j = 0; j < d; ++j) x[j] = rng.normal();
            accepted = rng.bernoulli(sigmoid(spec.magnitude * x[0]));
          }
          if (!accepted) throw ShiftSpecError("selection-bias sampling did not converge");
        }
        double s = intercept;
        for (int j = 0; j < d; ++j) s += w[j] * x[j];
        y = rng.bernoulli(sigmoid(s)) ? 1 : 0;
        return;
      }
    }
  }
};

TabularDataset assemble(const ShiftSpec& spec, const std::vector<std::vector<double>>& cols,
                        std::vector<std::int8_t> labels, std::vector<MonthStamp> months) {
  TabularDataset ds;
  for (int j = 0; j < spec.n_features; ++j) {
    std::string name = "f" + std::to_string(j);
    ds.schema.columns.push_back({name, ColumnKind::numeric, true});
    ds.numeric_cols.push_back({name, cols[static_cast<std::size_t>(j)]});
  }
  ds.schema.label_column = "y";
  ds.schema.month_column = "month";
  ds.labels = std::move(labels);
  ds.months = std::move(months);
  ds.row_ids.resize(ds.labels->size());
  for (std::size_t i = 0; i < ds.row_ids.size(); ++i) {
    ds.row_ids[i] = static_cast<std::int64_t>(i);
  }
  ds.check_consistent();
  return ds;
}

}  // namespace

std::pair<TabularDataset, TabularDataset> generate_shifted(const ShiftSpec& spec) {
  spec.validate();
  Generator gen(spec);
  const bool progressive =
      spec.kind == ShiftKind::covariate || spec.kind == ShiftKind::concept_shift;

  std::vector<std::vector<double>> train_cols(spec.n_features);
  std::vector<std::int8_t> train_labels(spec.n_train);
  std::vector<MonthStamp> train_months(spec.n_train);
  Rng train_rng(splitmix64(spec.seed ^ 0x545241494eULL));
  std::vector<double> x;
  for (std::size_t i = 0; i < spec.n_train; ++i) {
    const int month_index = static_cast<int>(i * static_cast<std::size_t>(spec.months) /
                                             spec.n_train);
    const double frac =
        progressive ? static_cast<double>(month_index) / spec.months : 0.0;
    gen.draw_row(train_rng, frac, true, x, train_labels[i]);
    for (int j = 0; j < spec.n_features; ++j) train_cols[static_cast<std::size_t>(j)].push_back(x[j]);
    train_months[i] = spec.first_month.plus(month_index);
  }

  std::vector<std::vector<double>> test_cols(spec.n_features);
  std::vector<std::int8_t> test_labels(spec.n_test);
  std::vector<MonthStamp> test_months(spec.n_test, spec.first_month.plus(spec.months));
  Rng test_rng(splitmix64(spec.seed ^ 0x54455354ULL));
  for (std::size_t i = 0; i < spec.n_test; ++i) {
    gen.draw_row(test_rng, 1.0, false, x, test_labels[i]);
    for (int j = 0; j < spec.n_features; ++j) test_cols[static_cast<std::size_t>(j)].push_back(x[j]);
  }

  return {assemble(spec, train_cols, std::move(train_labels), std::move(train_months)),
          assemble(spec, test_cols, std::move(test_labels), std::move(test_months))};
}

// ---------------------------------------------------------------------------
// GridConfig
// ---------------------------------------------------------------------------

namespace {

std::vector<MonthStamp> distinct_months(const TabularDataset& train) {
  if (!train.months) throw SchemaError("grid needs month stamps on the training data");
  std::set<MonthStamp> set(train.months->begin(), train.months->end());
  return {set.begin(), set.end()};
}

std::vector<double> default_keep_fractions() {
  std::vector<double> out;
  for (int i = 20; i >= 1; --i) out.push_back(static_cast<double>(i) / 20.0);
  return out;
}

}  // namespace

GridConfig GridConfig::paper_shape(const TabularDataset& train) {
  GridConfig config;
  auto months = distinct_months(train);
  config.set1_starts = months;
  std::vector<MonthStamp> ranges;
  for (std::size_t idx : {std::size_t{0}, std::size_t{6}, std::size_t{12}}) {
    if (idx < months.size()) ranges.push_back(months[idx]);
  }
  config.set2_range_starts = ranges;
  config.set3_weighted = true;
  config.set4_keep_fractions = default_keep_fractions();
  config.set5_keep_fractions = default_keep_fractions();
  return config;
}

std::string GridConfig::to_json_string() const {
  json j{{"k", k},
         {"seed", seed},
         {"adversarial_k", adversarial_k},
         {"adversarial_threshold", adversarial_threshold}};
  auto months_json = [](const std::vector<MonthStamp>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(m.str());
    return arr;
  };
  if (paper_shape_requested) j["paper_shape"] = true;
  if (set1_starts) j["set1_starts"] = months_json(*set1_starts);
  if (set2_range_starts) j["set2_range_starts"] = months_json(*set2_range_starts);
  if (set3_weighted) j["set3_weighted"] = true;
  if (set4_keep_fractions) j["set4_keep_fractions"] = *set4_keep_fractions;
  if (set5_keep_fractions) j["set5_keep_fractions"] = *set5_keep_fractions;
  return j.dump(2);
}

GridConfig GridConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("grid config JSON: ") + e.what());
  }
  GridConfig config;
  config.k = j.value("k", config.k);
  config.seed = j.value("seed", config.seed);
  config.adversarial_k = j.value("adversarial_k", config.adversarial_k);
  config.adversarial_threshold = j.value("adversarial_threshold", config.adversarial_threshold);
  config.paper_shape_requested = j.value("paper_shape", false);
  auto parse_months = [](const json& arr) {
    std::vector<MonthStamp> out;
    for (const auto& m : arr) out.push_back(MonthStamp::parse(m.get<std::string>()));
    return out;
  };
  if (j.contains("set1_starts")) config.set1_starts = parse_months(j["set1_starts"]);
  if (j.contains("set2_range_starts")) {
    config.set2_range_starts = parse_months(j["set2_range_starts"]);
  }
  config.set3_weighted = j.value("set3_weighted", false);
  if (j.contains("set4_keep_fractions")) {
    config.set4_keep_fractions = j["set4_keep_fractions"].get<std::vector<double>>();
  }
  if (j.contains("set5_keep_fractions")) {
    config.set5_keep_fractions = j["set5_keep_fractions"].get<std::vector<double>>();
  }
  return config;
}

GridConfig GridConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

// ---------------------------------------------------------------------------
// run_grid
// ---------------------------------------------------------------------------

ExperimentReport run_grid(const TabularDataset& train, const TabularDataset& test,
                          const BoostParams& params, const GridConfig& requested) {
  GridConfig config = requested;
  if (requested.paper_shape_requested) {
    GridConfig shape = GridConfig::paper_shape(train);
    shape.k = requested.k;
    shape.seed = requested.seed;
    shape.adversarial_k = requested.adversarial_k;
    shape.adversarial_threshold = requested.adversarial_threshold;
    config = shape;
  }

  ExperimentReport report;
  report.k = config.k;
  report.seed = config.seed;
  report.set_counts.assign(5, 0);

  const bool need_adversarial = config.set3_weighted ||
                                config.set4_keep_fractions.has_value() ||
                                config.set5_keep_fractions.has_value();
  std::optional<AdversarialReport> adv;
  if (need_adversarial) {
    AdversarialOptions opts;
    opts.k = config.adversarial_k;
    opts.threshold = config.adversarial_threshold;
    opts.seed = config.seed;
    adv = adversarial_validate(train, test, params, opts);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto run_cell = [&](int set_id, TrainingPlan plan, double adv_used) {
    auto t0 = std::chrono::steady_clock::now();
    StrategyOutcome outcome;
    try {
      outcome = execute_plan(plan, train, test, params);
    } catch (const FoldError& e) {
      throw FoldError(e.fold_index(), "set " + std::to_string(set_id) + " [" +
                                          plan.param_tag + "]: " + e.what());
    }
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report.rows.push_back({set_id, plan.strategy_tag, plan.param_tag,
                           outcome.mean_valid_auc, outcome.test_auc, adv_used,
                           dt.count()});
    report.set_counts[static_cast<std::size_t>(set_id - 1)] += 1;
  };

  if (config.set1_starts) {
    for (const auto& start : *config.set1_starts) {
      run_cell(1, chrono_cv_plan(train, start, config.k, config.seed), nan);
    }
  }
  if (config.set2_range_starts) {
    auto months = distinct_months(train);
    for (const auto& range_start : *config.set2_range_starts) {
      for (const auto& valid_start : months) {
        if (!(range_start < valid_start)) continue;
        run_cell(2, chrono_holdout_plan(train, range_start, valid_start), nan);
      }
    }
  }
  if (config.set3_weighted) {
    run_cell(3, weighted_plan(train, *adv, config.k, config.seed), adv->adv_auc);
  }
  if (config.set4_keep_fractions) {
    for (double keep : *config.set4_keep_fractions) {
      run_cell(4, filtered_cv_plan(train, *adv, keep, config.k, config.seed), adv->adv_auc);
    }
  }
  if (config.set5_keep_fractions) {
    for (double keep : *config.set5_keep_fractions) {
      run_cell(5, augmented_cv_plan(train, *adv, keep, config.k, config.seed), adv->adv_auc);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// emit_report
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json row_to_json(const ExperimentRow& row) {
  json j{{"set_id", row.set_id},
         {"strategy_tag", row.strategy_tag},
         {"param_tag", row.param_tag},
         {"mean_valid_auc", row.mean_valid_auc},
         {"test_auc", row.test_auc},
         {"runtime_seconds", row.runtime_seconds}};
  if (std::isnan(row.adv_auc_used)) {
    j["adv_auc_used"] = nullptr;
  } else {
    j["adv_auc_used"] = row.adv_auc_used;
  }
  return j;
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::string& dir) {
  if (report.rows.empty()) throw ContractError("experiment report is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());

  const std::string csv_path = dir + "/results.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write '" + csv_path + "'");
  csv << "set_id,strategy_tag,param_tag,mean_valid_auc,test_auc,adv_auc_used,"
         "runtime_seconds\n";
  for (const auto& row : report.rows) {
    csv << row.set_id << "," << row.strategy_tag << "," << row.param_tag << ","
        << format_double(row.mean_valid_auc) << "," << format_double(row.test_auc) << ","
        << (std::isnan(row.adv_auc_used) ? std::string() : format_double(row.adv_auc_used))
        << "," << format_double(row.runtime_seconds) << "\n";
  }
  if (!csv) throw IoError("failed writing '" + csv_path + "'");

  json best_per_set = json::array();
  const ExperimentRow* overall = nullptr;
  for (int set_id = 1; set_id <= 5; ++set_id) {
    const ExperimentRow* best = nullptr;
    for (const auto& row : report.rows) {
      if (row.set_id != set_id) continue;
      if (!best || row.test_auc > best->test_auc) best = &row;
    }
    if (best) {
      best_per_set.push_back(row_to_json(*best));
      if (!overall || best->test_auc > overall->test_auc) overall = best;
    }
  }
  json summary{{"n_rows", report.rows.size()},
               {"k", report.k},
               {"seed", report.seed},
               {"set_counts", report.set_counts},
               {"best_per_set", best_per_set},
               {"best", overall ? row_to_json(*overall) : json(nullptr)}};
  const std::string summary_path = dir + "/summary.json";
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + summary_path + "'");
  out << summary.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + summary_path + "'");
}

}  // namespace driftgate
