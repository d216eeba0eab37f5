#include "driftgate/adversarial.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "driftgate/errors.hpp"
#include "driftgate/folds.hpp"
#include "driftgate/metrics.hpp"
#include "driftgate/rng.hpp"

namespace driftgate {

using nlohmann::json;

std::string to_string(Verdict v) {
  return v == Verdict::shifted ? "shifted" : "consistent";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "shifted") return Verdict::shifted;
  if (s == "consistent") return Verdict::consistent;
  throw ParseError("unknown verdict '" + s + "'");
}

Verdict shift_verdict(double adv_auc, double threshold) {
  if (adv_auc < 0 || adv_auc > 1) throw ContractError("adv_auc outside [0,1]");
  return adv_auc >= threshold ? Verdict::shifted : Verdict::consistent;
}

// ---------------------------------------------------------------------------
// build_adversarial_dataset
// ---------------------------------------------------------------------------

TabularDataset build_adversarial_dataset(const TabularDataset& train,
                                         const TabularDataset& test) {
  if (train.schema.columns != test.schema.columns) {
    throw SchemaError("train/test feature schemas differ");
  }
  if (train.n_rows() == 0 || test.n_rows() == 0) {
    throw EmptyInputError("both datasets must be nonempty");
  }

  TabularDataset out;
  out.schema.columns = train.schema.columns;
  out.schema.label_column = "origin";
  const bool both_months = train.months && test.months;
  if (both_months) out.schema.month_column = train.schema.month_column;

  const std::size_t n = train.n_rows() + test.n_rows();

  for (const auto& spec : out.schema.columns) {
    if (spec.kind == ColumnKind::numeric) {
      NumericColumn col{spec.name, {}};
      col.values.reserve(n);
      const auto& a = train.numeric(spec.name);
      const auto& b = test.numeric(spec.name);
      col.values.insert(col.values.end(), a.values.begin(), a.values.end());
      col.values.insert(col.values.end(), b.values.begin(), b.values.end());
      out.numeric_cols.push_back(std::move(col));
    } else {
      const auto& a = train.categorical(spec.name);
      const auto& b = test.categorical(spec.name);
      CategoricalColumn col{spec.name, {}, nullptr};
      col.codes.reserve(n);
      col.codes.insert(col.codes.end(), a.codes.begin(), a.codes.end());
      if (a.dict == b.dict) {
        col.dict = a.dict;
        col.codes.insert(col.codes.end(), b.codes.begin(), b.codes.end());
      } else {
        // Different dictionary objects: remap the test side onto a union
        // dictionary so codes stay comparable.
        std::vector<std::string> values = a.dict->values();
        std::vector<std::int32_t> remap(b.dict->size());
        for (std::size_t c = 0; c < b.dict->size(); ++c) {
          const std::string& v = b.dict->values()[c];
          std::int32_t code = a.dict->find(v);
          if (code == kUnknownCategory) {
            code = static_cast<std::int32_t>(values.size());
            values.push_back(v);
          }
          remap[c] = code;
        }
        for (auto c : b.codes) {
          col.codes.push_back(c < 0 ? c : remap[static_cast<std::size_t>(c)]);
        }
        col.dict = std::make_shared<const CategoryDict>(std::move(values));
      }
      out.categorical_cols.push_back(std::move(col));
    }
  }

  std::vector<std::int8_t> origin(n, 0);
  std::fill(origin.begin() + static_cast<std::ptrdiff_t>(train.n_rows()), origin.end(), 1);
  out.labels = std::move(origin);

  if (both_months) {
    std::vector<MonthStamp> months;
    months.reserve(n);
    months.insert(months.end(), train.months->begin(), train.months->end());
    months.insert(months.end(), test.months->begin(), test.months->end());
    out.months = std::move(months);
  }

  std::vector<RowOrigin> prov;
  prov.reserve(n);
  for (auto id : train.row_ids) prov.push_back({0, id});
  for (auto id : test.row_ids) prov.push_back({1, id});
  out.provenance = std::move(prov);

  out.row_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.row_ids[i] = static_cast<std::int64_t>(i);
  out.check_consistent();
  return out;
}

// ---------------------------------------------------------------------------
// adversarial_validate
// ---------------------------------------------------------------------------

AdversarialReport adversarial_validate(const TabularDataset& train,
                                       const TabularDataset& test,
                                       const BoostParams& params,
                                       const AdversarialOptions& options) {
  if (options.k < 2) throw ContractError("adversarial k must be >= 2");
  params.validate();

  TabularDataset combined = build_adversarial_dataset(train, test);

  // Canonical row order (origin, original id): the report is then bit-equal
  // under any shuffling of the input rows.
  std::vector<std::size_t> order(combined.n_rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto& prov = *combined.provenance;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (prov[a].source != prov[b].source) return prov[a].source < prov[b].source;
    return prov[a].row_id < prov[b].row_id;
  });
  combined = combined.select_rows(order);

  const auto& origin = *combined.labels;
  const auto& cprov = *combined.provenance;
  const std::size_t n = combined.n_rows();

  // Folds keyed on each row's id within its own source, stratified by origin.
  const std::uint64_t seed = options.seed.value_or(params.seed);
  std::vector<std::int64_t> keys(n);
  std::vector<int> strata(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = cprov[i].row_id;
    strata[i] = origin[i];
  }
  std::vector<int> fold = assign_stratified_folds(keys, strata, options.k, seed);

  std::vector<double> oof(n, 0.0);
  for (int f = 0; f < options.k; ++f) {
    std::vector<std::size_t> fit_pos, held_pos;
    for (std::size_t i = 0; i < n; ++i) {
      (fold[i] == f ? held_pos : fit_pos).push_back(i);
    }
    if (held_pos.empty() || fit_pos.empty()) {
      throw FoldError(f, "empty fold");
    }

    TabularDataset held = combined.select_rows(held_pos);
    BoostedModel model;
    try {
      // Inner 1-in-5 early-stopping split, again keyed on source row ids.
      std::vector<std::int64_t> inner_keys;
      std::vector<int> inner_strata;
      inner_keys.reserve(fit_pos.size());
      for (auto i : fit_pos) {
        inner_keys.push_back(cprov[i].row_id);
        inner_strata.push_back(origin[i]);
      }
      std::vector<int> inner = assign_stratified_folds(
          inner_keys, inner_strata, 5,
          splitmix64(seed ^ static_cast<std::uint64_t>(f + 1)));

      std::vector<std::size_t> core_pos, stop_pos;
      for (std::size_t j = 0; j < fit_pos.size(); ++j) {
        (inner[j] == 0 ? stop_pos : core_pos).push_back(fit_pos[j]);
      }
      TabularDataset core = combined.select_rows(core_pos);
      TabularDataset stop = combined.select_rows(stop_pos);
      model = fit(core, &stop, params);
    } catch (const DegenerateLabelError& e) {
      throw FoldError(f, e.what());
    } catch (const ContractError& e) {
      throw FoldError(f, e.what());
    }
    auto p = model.predict_score(held);
    for (std::size_t j = 0; j < held_pos.size(); ++j) oof[held_pos[j]] = p[j];
  }

  AdversarialReport report;
  report.k = options.k;
  report.threshold = options.threshold;
  report.adv_auc = auc(origin, oof);
  report.verdict = shift_verdict(report.adv_auc, options.threshold);
  for (std::size_t i = 0; i < n; ++i) {
    if (origin[i] == 0) {
      report.per_row[cprov[i].row_id] = oof[i];
      report.fold_assignment[cprov[i].row_id] = fold[i];
    } else {
      report.test_per_row[cprov[i].row_id] = oof[i];
      report.test_fold_assignment[cprov[i].row_id] = fold[i];
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// report files
// ---------------------------------------------------------------------------

namespace {

std::string sidecar_path(const std::string& json_path) {
  auto dot = json_path.rfind('.');
  std::string stem = dot == std::string::npos ? json_path : json_path.substr(0, dot);
  return stem + ".csv";
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void AdversarialReport::save(const std::string& json_path) const {
  const std::string csv = sidecar_path(json_path);
  json j{{"format", "driftgate.adversarial.v1"},
         {"adv_auc", adv_auc},
         {"threshold", threshold},
         {"verdict", to_string(verdict)},
         {"k", k},
         {"n_train_rows", per_row.size()},
         {"n_test_rows", test_per_row.size()},
         {"per_row_csv", csv}};
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + json_path + "'");
  out << j.dump(2) << "\n";

  std::ofstream sc(csv, std::ios::binary);
  if (!sc) throw IoError("cannot write '" + csv + "'");
  sc << "row_id,p_test,fold\n";
  for (const auto& [id, p] : per_row) {
    sc << id << "," << format_double(p) << "," << fold_assignment.at(id) << "\n";
  }
  if (!sc) throw IoError("failed writing '" + csv + "'");
}

AdversarialReport AdversarialReport::load(const std::string& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + json_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("adversarial report '" + json_path + "': " + e.what());
  }
  if (j.value("format", std::string()) != "driftgate.adversarial.v1") {
    throw ParseError("'" + json_path + "' is not an adversarial report");
  }
  AdversarialReport report;
  report.adv_auc = j.at("adv_auc").get<double>();
  report.threshold = j.at("threshold").get<double>();
  report.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  report.k = j.at("k").get<int>();

  const std::string csv = j.at("per_row_csv").get<std::string>();
  std::ifstream sc(csv, std::ios::binary);
  if (!sc) throw IoError("cannot open report sidecar '" + csv + "'");
  std::string line;
  std::getline(sc, line);  // header
  std::size_t lineno = 1;
  while (std::getline(sc, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id_s, p_s, fold_s;
    if (!std::getline(ss, id_s, ',') || !std::getline(ss, p_s, ',') ||
        !std::getline(ss, fold_s)) {
      throw ParseError(csv + ":" + std::to_string(lineno) + ": malformed row");
    }
    try {
      std::int64_t id = std::stoll(id_s);
      report.per_row[id] = std::stod(p_s);
      report.fold_assignment[id] = std::stoi(fold_s);
    } catch (const std::exception&) {
      throw ParseError(csv + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  return report;
}

}  // namespace driftgate
