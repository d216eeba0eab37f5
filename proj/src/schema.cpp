#include "driftgate/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "driftgate/errors.hpp"

namespace driftgate {

using nlohmann::json;

std::string to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  throw SchemaError("unknown column kind '" + s + "'");
}

const ColumnSpec* FeatureSchema::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (c.name.empty()) throw SchemaError("empty column name");
    if (!seen.insert(c.name).second) {
      throw SchemaError("duplicate column name '" + c.name + "'");
    }
  }
  if (label_column.empty()) throw SchemaError("label column not set");
  if (seen.count(label_column)) {
    throw SchemaError("label column '" + label_column + "' also listed as a feature");
  }
  if (month_column && seen.count(*month_column)) {
    throw SchemaError("month column '" + *month_column + "' also listed as a feature");
  }
  if (month_column && *month_column == label_column) {
    throw SchemaError("month column equals label column");
  }
}

std::string FeatureSchema::to_json_string() const {
  json cols = json::array();
  for (const auto& c : columns) {
    cols.push_back({{"name", c.name},
                    {"kind", to_string(c.kind)},
                    {"missing_allowed", c.missing_allowed}});
  }
  json j{{"columns", cols}, {"label_column", label_column}};
  if (month_column) j["month_column"] = *month_column;
  return j.dump(2);
}

FeatureSchema FeatureSchema::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema JSON: ") + e.what());
  }
  FeatureSchema schema;
  if (!j.contains("columns") || !j["columns"].is_array()) {
    throw SchemaError("schema JSON missing 'columns' array");
  }
  for (const auto& c : j["columns"]) {
    ColumnSpec spec;
    spec.name = c.at("name").get<std::string>();
    spec.kind = column_kind_from_string(c.value("kind", std::string("numeric")));
    spec.missing_allowed = c.value("missing_allowed", true);
    schema.columns.push_back(std::move(spec));
  }
  schema.label_column = j.value("label_column", std::string());
  if (j.contains("month_column")) {
    schema.month_column = j["month_column"].get<std::string>();
  }
  schema.validate();
  return schema;
}

FeatureSchema FeatureSchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

void FeatureSchema::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schema file '" + path + "'");
  out << to_json_string() << "\n";
}

FeatureSchema lending_club_raw_schema() {
  // Raw export kinds: percent-style and "NN months" fields arrive as text and
  // are normalized in preprocess_lending_club.
  FeatureSchema s;
  auto num = [&](const char* n) { s.columns.push_back({n, ColumnKind::numeric, true}); };
  auto cat = [&](const char* n) { s.columns.push_back({n, ColumnKind::categorical, true}); };
  num("loan_amnt");
  cat("term");
  cat("int_rate");
  num("installment");
  cat("sub_grade");
  cat("emp_length");
  cat("home_ownership");
  num("annual_inc");
  cat("verification_status");
  cat("purpose");
  cat("addr_state");
  num("dti");
  cat("earliest_cr_line");
  num("fico_range_low");
  num("fico_range_high");
  num("open_acc");
  num("pub_rec");
  num("revol_bal");
  cat("revol_util");
  num("total_acc");
  cat("initial_list_status");
  cat("application_type");
  num("mort_acc");
  num("pub_rec_bankruptcies");
  s.label_column = "loan_status";
  s.month_column = "issue_d";
  s.validate();
  return s;
}

}  // namespace driftgate
