// driftgate command-line interface: dataset ingestion, shift detection,
// training-plan construction/execution, the experiment grid and the synthetic
// shift generator.
//
// Exit codes: 0 success, 2 contract/schema error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driftgate/adversarial.hpp"
#include "driftgate/dataset.hpp"
#include "driftgate/errors.hpp"
#include "driftgate/harness.hpp"
#include "driftgate/strategies.hpp"

namespace dg = driftgate;

namespace {

dg::BoostParams load_params_or_default(const std::string& path) {
  if (path.empty()) return dg::BoostParams{};
  return dg::BoostParams::load(path);
}

void print_summary(const dg::TabularDataset& ds) {
  std::printf("%-22s %10s %10s %12s %12s %12s %12s\n", "column", "count", "missing",
              "mean", "std", "min", "max");
  for (const auto& s : dg::summarize(ds)) {
    if (s.moments_defined) {
      std::printf("%-22s %10zu %10zu %12.4f %12.4f %12.4f %12.4f\n", s.name.c_str(),
                  s.count, s.missing, s.mean, s.std_dev, s.min, s.max);
    } else {
      std::printf("%-22s %10zu %10zu %12s %12s %12s %12s\n", s.name.c_str(), s.count,
                  s.missing, "-", "-", "-", "-");
    }
  }
}

struct IngestArgs {
  std::string csv, schema, out;
  bool lending_club = false;
  bool summary = false;
};

struct AdversarialArgs {
  std::string train, test, params, out;
  int k = 5;
  double threshold = 0.7;
  std::optional<std::uint64_t> seed;
};

struct PlanArgs {
  std::string strategy, train, report, out;
  std::string start, valid_start;
  double keep_fraction = 1.0;
  int k = 5;
  std::uint64_t seed = 42;
};

struct RunArgs {
  std::string plan, train, test, params, out, models_out;
};

struct GridArgs {
  std::string train, test, config, params, out;
};

struct GenerateArgs {
  std::string kind = "none";
  double magnitude = 0.0;
  std::uint64_t seed = 42;
  std::string out_train, out_test, out_schema;
  std::size_t n_train = 20000, n_test = 4000;
  int n_features = 10;
  double base_rate = 0.2;
  int months = 18;
};

int run_ingest(const IngestArgs& args) {
  dg::FeatureSchema schema = args.schema.empty() && args.lending_club
                                 ? dg::lending_club_raw_schema()
                                 : dg::FeatureSchema::load(args.schema);
  dg::TabularDataset ds = dg::load_csv(args.csv, schema);
  if (args.lending_club) {
    ds = dg::encode_loan_status(ds);
    ds = dg::preprocess_lending_club(ds);
  }
  dg::save_dataset(ds, args.out);
  std::printf("wrote %s: %zu rows, %zu features\n", args.out.c_str(), ds.n_rows(),
              ds.n_features());
  if (args.summary) print_summary(ds);
  return 0;
}

int run_adversarial(const AdversarialArgs& args) {
  auto train = dg::load_dataset(args.train);
  auto test = dg::load_dataset(args.test);
  auto params = load_params_or_default(args.params);
  dg::AdversarialOptions options;
  options.k = args.k;
  options.threshold = args.threshold;
  options.seed = args.seed;
  auto report = dg::adversarial_validate(train, test, params, options);
  report.save(args.out);
  std::printf("adv_auc=%.6f threshold=%.4f verdict=%s\n", report.adv_auc, report.threshold,
              dg::to_string(report.verdict).c_str());
  return 0;
}

int run_plan(const PlanArgs& args) {
  auto train = dg::load_dataset(args.train);
  std::optional<dg::AdversarialReport> report;
  if (!args.report.empty()) report = dg::AdversarialReport::load(args.report);

  auto need_report = [&]() -> const dg::AdversarialReport& {
    if (!report) {
      throw dg::ContractError("strategy '" + args.strategy + "' needs --report");
    }
    return *report;
  };
  auto need_month = [&](const std::string& value, const char* flag) {
    if (value.empty()) {
      throw dg::ContractError("strategy '" + args.strategy + "' needs " + flag);
    }
    return dg::MonthStamp::parse(value);
  };

  dg::TrainingPlan plan;
  if (args.strategy == "baseline") {
    plan = dg::baseline_cv_plan(train, args.k, args.seed);
  } else if (args.strategy == "chrono-cv") {
    plan = dg::chrono_cv_plan(train, need_month(args.start, "--start"), args.k, args.seed);
  } else if (args.strategy == "chrono-holdout") {
    plan = dg::chrono_holdout_plan(train, need_month(args.start, "--start"),
                                   need_month(args.valid_start, "--valid-start"));
  } else if (args.strategy == "weighted") {
    plan = dg::weighted_plan(train, need_report(), args.k, args.seed);
  } else if (args.strategy == "filtered") {
    plan = dg::filtered_cv_plan(train, need_report(), args.keep_fraction, args.k, args.seed);
  } else if (args.strategy == "augmented") {
    plan = dg::augmented_cv_plan(train, need_report(), args.keep_fraction, args.k, args.seed);
  } else {
    throw dg::ContractError("unknown strategy '" + args.strategy + "'");
  }
  plan.save(args.out);
  std::printf("wrote %s: %s/%s, %zu folds\n", args.out.c_str(), plan.strategy_tag.c_str(),
              plan.param_tag.c_str(), plan.folds.size());
  return 0;
}

int run_run(const RunArgs& args) {
  auto plan = dg::TrainingPlan::load(args.plan);
  auto train = dg::load_dataset(args.train);
  auto test = dg::load_dataset(args.test);
  auto params = load_params_or_default(args.params);
  auto outcome = dg::execute_plan(plan, train, test, params);
  outcome.save(args.out);
  if (!args.models_out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(args.models_out, ec);
    if (ec) throw dg::IoError("cannot create '" + args.models_out + "': " + ec.message());
    for (std::size_t f = 0; f < outcome.models.size(); ++f) {
      outcome.models[f].save(args.models_out + "/fold" + std::to_string(f) + ".json");
    }
  }
  std::printf("mean_valid_auc=%.6f test_auc=%.6f\n", outcome.mean_valid_auc,
              outcome.test_auc);
  return 0;
}

int run_grid_cmd(const GridArgs& args) {
  auto train = dg::load_dataset(args.train);
  auto test = dg::load_dataset(args.test);
  auto params = load_params_or_default(args.params);
  auto config = dg::GridConfig::load(args.config);
  auto report = dg::run_grid(train, test, params, config);
  dg::emit_report(report, args.out);
  std::printf("wrote %zu experiment rows to %s\n", report.rows.size(), args.out.c_str());
  return 0;
}

int run_generate(const GenerateArgs& args) {
  dg::ShiftSpec spec;
  spec.kind = dg::shift_kind_from_string(args.kind);
  spec.magnitude = args.magnitude;
  spec.seed = args.seed;
  spec.n_train = args.n_train;
  spec.n_test = args.n_test;
  spec.n_features = args.n_features;
  spec.base_rate = args.base_rate;
  spec.months = args.months;
  auto [train, test] = dg::generate_shifted(spec);
  dg::write_csv(train, args.out_train);
  dg::write_csv(test, args.out_test);
  if (!args.out_schema.empty()) train.schema.save(args.out_schema);
  std::printf("wrote %zu train rows to %s, %zu test rows to %s\n", train.n_rows(),
              args.out_train.c_str(), test.n_rows(), args.out_test.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset-shift detection and shift-aware training plans for "
               "tabular binary classification"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "Load a CSV into a dataset file");
  cmd_ingest->add_option("--csv", ingest.csv, "Input CSV path")->required();
  cmd_ingest->add_option("--schema", ingest.schema, "Schema JSON path");
  cmd_ingest->add_option("--out", ingest.out, "Output dataset path")->required();
  cmd_ingest->add_flag("--lending-club", ingest.lending_club,
                       "Apply the Lending Club label encoding and feature pipeline");
  cmd_ingest->add_flag("--summary", ingest.summary, "Print per-column statistics");

  AdversarialArgs adv;
  auto* cmd_adv = app.add_subcommand("adversarial", "Train-vs-test origin validation");
  cmd_adv->add_option("--train", adv.train, "Training dataset file")->required();
  cmd_adv->add_option("--test", adv.test, "Test dataset file")->required();
  cmd_adv->add_option("--params", adv.params, "Booster params JSON");
  cmd_adv->add_option("--k", adv.k, "Fold count");
  cmd_adv->add_option("--threshold", adv.threshold, "Shift verdict threshold");
  std::uint64_t adv_seed = 0;
  auto* adv_seed_opt = cmd_adv->add_option("--seed", adv_seed, "Fold-assignment seed");
  cmd_adv->add_option("--out", adv.out, "Report JSON path (CSV sidecar beside it)")
      ->required();

  PlanArgs plan;
  auto* cmd_plan = app.add_subcommand("plan", "Construct a training plan");
  cmd_plan
      ->add_option("--strategy", plan.strategy,
                   "baseline|chrono-cv|chrono-holdout|weighted|filtered|augmented")
      ->required();
  cmd_plan->add_option("--train", plan.train, "Training dataset file")->required();
  cmd_plan->add_option("--report", plan.report, "Adversarial report JSON");
  cmd_plan->add_option("--start", plan.start, "Start month (YYYY-MM)");
  cmd_plan->add_option("--valid-start", plan.valid_start, "Validation start month");
  cmd_plan->add_option("--keep-fraction", plan.keep_fraction,
                       "Fraction of most test-like rows to keep");
  cmd_plan->add_option("--k", plan.k, "Fold count");
  cmd_plan->add_option("--seed", plan.seed, "Fold-assignment seed");
  cmd_plan->add_option("--out", plan.out, "Plan JSON path")->required();

  RunArgs run;
  auto* cmd_run = app.add_subcommand("run", "Execute a training plan");
  cmd_run->add_option("--plan", run.plan, "Plan JSON path")->required();
  cmd_run->add_option("--train", run.train, "Training dataset file")->required();
  cmd_run->add_option("--test", run.test, "Test dataset file")->required();
  cmd_run->add_option("--params", run.params, "Booster params JSON");
  cmd_run->add_option("--out", run.out, "Outcome JSON path")->required();
  cmd_run->add_option("--models-out", run.models_out, "Directory for fold model JSONs");

  GridArgs grid;
  auto* cmd_grid = app.add_subcommand("grid", "Run the experiment grid");
  cmd_grid->add_option("--train", grid.train, "Training dataset file")->required();
  cmd_grid->add_option("--test", grid.test, "Test dataset file")->required();
  cmd_grid->add_option("--config", grid.config, "Grid config JSON")->required();
  cmd_grid->add_option("--params", grid.params, "Booster params JSON");
  cmd_grid->add_option("--out", grid.out, "Output directory")->required();

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate synthetic shifted data");
  cmd_gen->add_option("--kind", gen.kind,
                      "none|covariate|prior_probability|concept|selection_bias");
  cmd_gen->add_option("--magnitude", gen.magnitude, "Shift magnitude");
  cmd_gen->add_option("--seed", gen.seed, "Generator seed");
  cmd_gen->add_option("--n-train", gen.n_train, "Training rows");
  cmd_gen->add_option("--n-test", gen.n_test, "Test rows");
  cmd_gen->add_option("--n-features", gen.n_features, "Feature count");
  cmd_gen->add_option("--base-rate", gen.base_rate, "Population positive rate");
  cmd_gen->add_option("--months", gen.months, "Months spanned by training rows");
  cmd_gen->add_option("--out-train", gen.out_train, "Training CSV path")->required();
  cmd_gen->add_option("--out-test", gen.out_test, "Test CSV path")->required();
  cmd_gen->add_option("--out-schema", gen.out_schema, "Schema JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_ingest) return run_ingest(ingest);
    if (*cmd_adv) {
      if (adv_seed_opt->count() > 0) adv.seed = adv_seed;
      return run_adversarial(adv);
    }
    if (*cmd_plan) return run_plan(plan);
    if (*cmd_run) return run_run(run);
    if (*cmd_grid) return run_grid_cmd(grid);
    if (*cmd_gen) return run_generate(gen);
  } catch (const dg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
