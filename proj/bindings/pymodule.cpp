// Python bindings for the driftgate core: datasets, the booster, metrics,
// adversarial validation, training plans and the experiment grid.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "driftgate/adversarial.hpp"
#include "driftgate/dataset.hpp"
#include "driftgate/errors.hpp"
#include "driftgate/gbdt.hpp"
#include "driftgate/harness.hpp"
#include "driftgate/metrics.hpp"
#include "driftgate/strategies.hpp"

namespace py = pybind11;
namespace dg = driftgate;

namespace {

dg::MonthStamp month_arg(const std::string& text) { return dg::MonthStamp::parse(text); }

std::vector<dg::ScoredSample> to_samples(const std::vector<int>& labels,
                                         const std::vector<double>& scores,
                                         const std::optional<std::vector<double>>& weights) {
  if (labels.size() != scores.size()) {
    throw dg::ContractError("labels/scores length mismatch");
  }
  if (weights && weights->size() != labels.size()) {
    throw dg::ContractError("weights length mismatch");
  }
  std::vector<dg::ScoredSample> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = {labels[i], scores[i], weights ? (*weights)[i] : 1.0};
  }
  return out;
}

py::dict row_to_dict(const dg::ExperimentRow& row) {
  py::dict d;
  d["set_id"] = row.set_id;
  d["strategy_tag"] = row.strategy_tag;
  d["param_tag"] = row.param_tag;
  d["mean_valid_auc"] = row.mean_valid_auc;
  d["test_auc"] = row.test_auc;
  d["adv_auc_used"] = row.adv_auc_used;
  d["runtime_seconds"] = row.runtime_seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dataset-shift detection and shift-aware training plans for tabular "
            "binary classification";

  py::register_exception<dg::Error>(m, "DriftgateError", PyExc_RuntimeError);

  py::class_<dg::TabularDataset>(m, "Dataset")
      .def_property_readonly("n_rows", &dg::TabularDataset::n_rows)
      .def_property_readonly("n_features", &dg::TabularDataset::n_features)
      .def_property_readonly("feature_names",
                             [](const dg::TabularDataset& ds) {
                               std::vector<std::string> names;
                               for (const auto& c : ds.schema.columns) names.push_back(c.name);
                               return names;
                             })
      .def_property_readonly("row_ids",
                             [](const dg::TabularDataset& ds) { return ds.row_ids; })
      .def_property_readonly("labels",
                             [](const dg::TabularDataset& ds) -> py::object {
                               if (!ds.labels) return py::none();
                               return py::cast(std::vector<int>(ds.labels->begin(),
                                                                ds.labels->end()));
                             })
      .def_property_readonly("months",
                             [](const dg::TabularDataset& ds) -> py::object {
                               if (!ds.months) return py::none();
                               std::vector<std::string> out;
                               for (const auto& m : *ds.months) out.push_back(m.str());
                               return py::cast(out);
                             })
      .def("column",
           [](const dg::TabularDataset& ds, const std::string& name) {
             return ds.numeric(name).values;
           },
           py::arg("name"), "Values of a numeric column (NaN marks missing)")
      .def("save",
           [](const dg::TabularDataset& ds, const std::string& path) {
             dg::save_dataset(ds, path);
           },
           py::arg("path"))
      .def("__repr__", [](const dg::TabularDataset& ds) {
        return "<driftgate.Dataset rows=" + std::to_string(ds.n_rows()) +
               " features=" + std::to_string(ds.n_features()) + ">";
      });

  m.def("load_csv",
        [](const std::string& path, const std::string& schema_path,
           const dg::TabularDataset* dicts) {
          return dg::load_csv(path, dg::FeatureSchema::load(schema_path), dicts);
        },
        py::arg("path"), py::arg("schema_path"), py::arg("dict_source") = nullptr);
  m.def("write_csv", &dg::write_csv, py::arg("dataset"), py::arg("path"));
  m.def("save_dataset", &dg::save_dataset, py::arg("dataset"), py::arg("path"));
  m.def("load_dataset", &dg::load_dataset, py::arg("path"));
  m.def("encode_loan_status", &dg::encode_loan_status, py::arg("dataset"));
  m.def("preprocess_lending_club", &dg::preprocess_lending_club, py::arg("dataset"));
  m.def("split_by_month",
        [](const dg::TabularDataset& ds, const std::string& first_test_month) {
          return dg::split_by_month(ds, month_arg(first_test_month));
        },
        py::arg("dataset"), py::arg("first_test_month"));
  m.def("summarize", [](const dg::TabularDataset& ds) {
    py::list out;
    for (const auto& s : dg::summarize(ds)) {
      py::dict d;
      d["name"] = s.name;
      d["count"] = s.count;
      d["missing"] = s.missing;
      if (s.moments_defined) {
        d["mean"] = s.mean;
        d["std"] = s.std_dev;
        d["min"] = s.min;
        d["q25"] = s.q25;
        d["q50"] = s.q50;
        d["q75"] = s.q75;
        d["max"] = s.max;
      }
      out.append(d);
    }
    return out;
  });

  py::class_<dg::BoostParams>(m, "BoostParams")
      .def(py::init([](int num_boost_round, int early_stopping_rounds, double learning_rate,
                       int max_depth, int num_leaves, double colsample_bytree,
                       double subsample, int subsample_freq, int min_data_in_leaf,
                       double l2_reg, int max_bins, std::uint64_t seed) {
             dg::BoostParams p;
             p.num_boost_round = num_boost_round;
             p.early_stopping_rounds = early_stopping_rounds;
             p.learning_rate = learning_rate;
             p.max_depth = max_depth;
             p.num_leaves = num_leaves;
             p.colsample_bytree = colsample_bytree;
             p.subsample = subsample;
             p.subsample_freq = subsample_freq;
             p.min_data_in_leaf = min_data_in_leaf;
             p.l2_reg = l2_reg;
             p.max_bins = max_bins;
             p.seed = seed;
             p.validate();
             return p;
           }),
           py::arg("num_boost_round") = 50000, py::arg("early_stopping_rounds") = 200,
           py::arg("learning_rate") = 0.1, py::arg("max_depth") = 4,
           py::arg("num_leaves") = 8, py::arg("colsample_bytree") = 0.8,
           py::arg("subsample") = 0.8, py::arg("subsample_freq") = 3,
           py::arg("min_data_in_leaf") = 20, py::arg("l2_reg") = 1.0,
           py::arg("max_bins") = 255, py::arg("seed") = 42)
      .def_readwrite("num_boost_round", &dg::BoostParams::num_boost_round)
      .def_readwrite("early_stopping_rounds", &dg::BoostParams::early_stopping_rounds)
      .def_readwrite("learning_rate", &dg::BoostParams::learning_rate)
      .def_readwrite("max_depth", &dg::BoostParams::max_depth)
      .def_readwrite("num_leaves", &dg::BoostParams::num_leaves)
      .def_readwrite("colsample_bytree", &dg::BoostParams::colsample_bytree)
      .def_readwrite("subsample", &dg::BoostParams::subsample)
      .def_readwrite("subsample_freq", &dg::BoostParams::subsample_freq)
      .def_readwrite("min_data_in_leaf", &dg::BoostParams::min_data_in_leaf)
      .def_readwrite("l2_reg", &dg::BoostParams::l2_reg)
      .def_readwrite("max_bins", &dg::BoostParams::max_bins)
      .def_readwrite("seed", &dg::BoostParams::seed)
      .def_static("load", &dg::BoostParams::load, py::arg("path"))
      .def("save", &dg::BoostParams::save, py::arg("path"));

  py::class_<dg::BoostedModel>(m, "Model")
      .def_property_readonly("base_score", [](const dg::BoostedModel& m_) { return m_.base_score; })
      .def_property_readonly("best_iteration",
                             [](const dg::BoostedModel& m_) { return m_.best_iteration; })
      .def_property_readonly("n_trees",
                             [](const dg::BoostedModel& m_) { return m_.trees.size(); })
      .def("predict", &dg::BoostedModel::predict_score, py::arg("dataset"),
           "Per-row probability of the positive class")
      .def("predict_raw", &dg::BoostedModel::predict_raw, py::arg("dataset"),
           py::arg("n_trees") = -1)
      .def("feature_importance",
           [](const dg::BoostedModel& m_) { return dg::feature_importance(m_); })
      .def("save", &dg::BoostedModel::save, py::arg("path"))
      .def_static("load", &dg::BoostedModel::load, py::arg("path"));

  m.def("fit",
        [](const dg::TabularDataset& train, const dg::TabularDataset* valid,
           const dg::BoostParams& params, const std::optional<std::vector<double>>& weights) {
          return dg::fit(train, valid, params,
                         weights ? std::span<const double>(*weights)
                                 : std::span<const double>());
        },
        py::arg("train"), py::arg("valid") = nullptr,
        py::arg("params") = dg::BoostParams{}, py::arg("weights") = py::none());

  m.def("auc",
        [](const std::vector<int>& labels, const std::vector<double>& scores,
           const std::optional<std::vector<double>>& weights) {
          return dg::auc(to_samples(labels, scores, weights));
        },
        py::arg("labels"), py::arg("scores"), py::arg("weights") = py::none());
  m.def("ks_statistic",
        [](const std::vector<int>& labels, const std::vector<double>& scores,
           const std::optional<std::vector<double>>& weights) {
          return dg::ks_statistic(to_samples(labels, scores, weights));
        },
        py::arg("labels"), py::arg("scores"), py::arg("weights") = py::none());
  m.def("psi",
        [](const std::vector<double>& expected, const std::vector<double>& actual) {
          return dg::psi(expected, actual);
        },
        py::arg("expected"), py::arg("actual"));
  m.def("psi_from_scores",
        [](const std::vector<double>& expected, const std::vector<double>& actual) {
          return dg::psi_from_scores(expected, actual);
        },
        py::arg("expected_scores"), py::arg("actual_scores"));

  py::class_<dg::AdversarialReport>(m, "AdversarialReport")
      .def_readonly("adv_auc", &dg::AdversarialReport::adv_auc)
      .def_readonly("threshold", &dg::AdversarialReport::threshold)
      .def_readonly("k", &dg::AdversarialReport::k)
      .def_property_readonly("verdict",
                             [](const dg::AdversarialReport& r) { return dg::to_string(r.verdict); })
      .def_readonly("per_row", &dg::AdversarialReport::per_row)
      .def_readonly("fold_assignment", &dg::AdversarialReport::fold_assignment)
      .def("save", &dg::AdversarialReport::save, py::arg("json_path"))
      .def_static("load", &dg::AdversarialReport::load, py::arg("json_path"));

  m.def("build_adversarial_dataset", &dg::build_adversarial_dataset, py::arg("train"),
        py::arg("test"));
  m.def("adversarial_validate",
        [](const dg::TabularDataset& train, const dg::TabularDataset& test,
           const dg::BoostParams& params, int k, double threshold,
           std::optional<std::uint64_t> seed) {
          dg::AdversarialOptions options;
          options.k = k;
          options.threshold = threshold;
          options.seed = seed;
          return dg::adversarial_validate(train, test, params, options);
        },
        py::arg("train"), py::arg("test"), py::arg("params") = dg::BoostParams{},
        py::arg("k") = 5, py::arg("threshold") = 0.7, py::arg("seed") = py::none());
  m.def("verdict",
        [](double adv_auc, double threshold) {
          return dg::to_string(dg::shift_verdict(adv_auc, threshold));
        },
        py::arg("adv_auc"), py::arg("threshold") = 0.7);

  py::class_<dg::TrainingPlan>(m, "TrainingPlan")
      .def_readonly("strategy_tag", &dg::TrainingPlan::strategy_tag)
      .def_readonly("param_tag", &dg::TrainingPlan::param_tag)
      .def_property_readonly("n_folds",
                             [](const dg::TrainingPlan& p) { return p.folds.size(); })
      .def("fold",
           [](const dg::TrainingPlan& p, std::size_t i) {
             if (i >= p.folds.size()) throw dg::ContractError("fold index out of range");
             return py::make_tuple(p.folds[i].train_rows, p.folds[i].valid_rows);
           },
           py::arg("index"), "(train_row_ids, valid_row_ids) of one fold")
      .def_property_readonly("weights",
                             [](const dg::TrainingPlan& p) -> py::object {
                               if (!p.weights) return py::none();
                               return py::cast(*p.weights);
                             })
      .def("save", &dg::TrainingPlan::save, py::arg("path"))
      .def_static("load", &dg::TrainingPlan::load, py::arg("path"));

  m.def("baseline_cv_plan", &dg::baseline_cv_plan, py::arg("train"), py::arg("k") = 5,
        py::arg("seed") = 42);
  m.def("chrono_cv_plan",
        [](const dg::TabularDataset& train, const std::string& start, int k,
           std::uint64_t seed) {
          return dg::chrono_cv_plan(train, month_arg(start), k, seed);
        },
        py::arg("train"), py::arg("start"), py::arg("k") = 5, py::arg("seed") = 42);
  m.def("chrono_holdout_plan",
        [](const dg::TabularDataset& train, const std::string& range_start,
           const std::string& valid_start) {
          return dg::chrono_holdout_plan(train, month_arg(range_start), month_arg(valid_start));
        },
        py::arg("train"), py::arg("range_start"), py::arg("valid_start"));
  m.def("weighted_plan", &dg::weighted_plan, py::arg("train"), py::arg("report"),
        py::arg("k") = 5, py::arg("seed") = 42);
  m.def("filtered_cv_plan", &dg::filtered_cv_plan, py::arg("train"), py::arg("report"),
        py::arg("keep_fraction"), py::arg("k") = 5, py::arg("seed") = 42);
  m.def("augmented_cv_plan", &dg::augmented_cv_plan, py::arg("train"), py::arg("report"),
        py::arg("keep_fraction"), py::arg("k") = 5, py::arg("seed") = 42);
  m.def("select_top_rows", &dg::select_top_rows, py::arg("train"), py::arg("report"),
        py::arg("keep_fraction"));

  py::class_<dg::StrategyOutcome>(m, "StrategyOutcome")
      .def_readonly("per_fold_valid_auc", &dg::StrategyOutcome::per_fold_valid_auc)
      .def_readonly("mean_valid_auc", &dg::StrategyOutcome::mean_valid_auc)
      .def_readonly("test_auc", &dg::StrategyOutcome::test_auc)
      .def_readonly("plan", &dg::StrategyOutcome::plan)
      .def_property_readonly("models",
                             [](const dg::StrategyOutcome& o) { return o.models; })
      .def("save", &dg::StrategyOutcome::save, py::arg("path"));

  m.def("execute_plan", &dg::execute_plan, py::arg("plan"), py::arg("train"),
        py::arg("test"), py::arg("params") = dg::BoostParams{});

  m.def("generate_shifted",
        [](const std::string& kind, double magnitude, std::size_t n_train,
           std::size_t n_test, int n_features, double base_rate, std::uint64_t seed,
           int months, const std::string& first_month) {
          dg::ShiftSpec spec;
          spec.kind = dg::shift_kind_from_string(kind);
          spec.magnitude = magnitude;
          spec.n_train = n_train;
          spec.n_test = n_test;
          spec.n_features = n_features;
          spec.base_rate = base_rate;
          spec.seed = seed;
          spec.months = months;
          spec.first_month = month_arg(first_month);
          return dg::generate_shifted(spec);
        },
        py::arg("kind") = "none", py::arg("magnitude") = 0.0, py::arg("n_train") = 20000,
        py::arg("n_test") = 4000, py::arg("n_features") = 10, py::arg("base_rate") = 0.2,
        py::arg("seed") = 42, py::arg("months") = 18, py::arg("first_month") = "2018-01");

  py::class_<dg::ExperimentReport>(m, "ExperimentReport")
      .def_property_readonly("rows",
                             [](const dg::ExperimentReport& r) {
                               py::list out;
                               for (const auto& row : r.rows) out.append(row_to_dict(row));
                               return out;
                             })
      .def_readonly("set_counts", &dg::ExperimentReport::set_counts)
      .def_readonly("k", &dg::ExperimentReport::k)
      .def_readonly("seed", &dg::ExperimentReport::seed);

  m.def("run_grid",
        [](const dg::TabularDataset& train, const dg::TabularDataset& test,
           const dg::BoostParams& params, const std::string& config_json) {
          return dg::run_grid(train, test, params,
                              dg::GridConfig::from_json_string(config_json));
        },
        py::arg("train"), py::arg("test"), py::arg("params"), py::arg("config_json"));
  m.def("emit_report", &dg::emit_report, py::arg("report"), py::arg("dir"));

#ifdef VERSION_INFO
#define DG_STR_IMPL(x) #x
#define DG_STR(x) DG_STR_IMPL(x)
  m.attr("__version__") = DG_STR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
