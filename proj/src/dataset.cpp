#include "driftgate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "driftgate/errors.hpp"

namespace driftgate {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CategoryDict
// ---------------------------------------------------------------------------

CategoryDict::CategoryDict(std::vector<std::string> values) : values_(std::move(values)) {
  index_.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    index_.emplace(values_[i], static_cast<std::int32_t>(i));
  }
}

std::int32_t CategoryDict::find(const std::string& value) const {
  auto it = index_.find(value);
  return it == index_.end() ? kUnknownCategory : it->second;
}

const std::string& CategoryDict::value(std::int32_t code) const {
  static const std::string kMissingRepr;
  if (code < 0 || static_cast<std::size_t>(code) >= values_.size()) return kMissingRepr;
  return values_[static_cast<std::size_t>(code)];
}

// ---------------------------------------------------------------------------
// TabularDataset
// ---------------------------------------------------------------------------

const NumericColumn& TabularDataset::numeric(const std::string& name) const {
  for (const auto& c : numeric_cols) {
    if (c.name == name) return c;
  }
  throw SchemaError("numeric column '" + name + "' not found");
}

const CategoricalColumn& TabularDataset::categorical(const std::string& name) const {
  for (const auto& c : categorical_cols) {
    if (c.name == name) return c;
  }
  throw SchemaError("categorical column '" + name + "' not found");
}

TabularDataset TabularDataset::select_rows(std::span<const std::size_t> positions) const {
  TabularDataset out;
  out.schema = schema;
  out.row_ids.reserve(positions.size());
  for (auto p : positions) out.row_ids.push_back(row_ids.at(p));

  for (const auto& c : numeric_cols) {
    NumericColumn nc{c.name, {}};
    nc.values.reserve(positions.size());
    for (auto p : positions) nc.values.push_back(c.values[p]);
    out.numeric_cols.push_back(std::move(nc));
  }
  for (const auto& c : categorical_cols) {
    CategoricalColumn cc{c.name, {}, c.dict};
    cc.codes.reserve(positions.size());
    for (auto p : positions) cc.codes.push_back(c.codes[p]);
    out.categorical_cols.push_back(std::move(cc));
  }
  if (labels) {
    std::vector<std::int8_t> l;
    l.reserve(positions.size());
    for (auto p : positions) l.push_back((*labels)[p]);
    out.labels = std::move(l);
  }
  if (months) {
    std::vector<MonthStamp> m;
    m.reserve(positions.size());
    for (auto p : positions) m.push_back((*months)[p]);
    out.months = std::move(m);
  }
  if (raw_label) {
    CategoricalColumn cc{raw_label->name, {}, raw_label->dict};
    cc.codes.reserve(positions.size());
    for (auto p : positions) cc.codes.push_back(raw_label->codes[p]);
    out.raw_label = std::move(cc);
  }
  if (provenance) {
    std::vector<RowOrigin> pr;
    pr.reserve(positions.size());
    for (auto p : positions) pr.push_back((*provenance)[p]);
    out.provenance = std::move(pr);
  }
  return out;
}

std::vector<std::size_t> TabularDataset::positions_of(std::span<const std::int64_t> ids) const {
  std::unordered_map<std::int64_t, std::size_t> pos;
  pos.reserve(row_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) pos.emplace(row_ids[i], i);
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (auto id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) {
      throw ContractError("row id " + std::to_string(id) + " not present in dataset");
    }
    out.push_back(it->second);
  }
  return out;
}

void TabularDataset::check_consistent() const {
  schema.validate();
  const std::size_t n = n_rows();
  for (const auto& c : numeric_cols) {
    if (c.values.size() != n) throw ContractError("column '" + c.name + "' length mismatch");
  }
  for (const auto& c : categorical_cols) {
    if (c.codes.size() != n) throw ContractError("column '" + c.name + "' length mismatch");
    if (!c.dict) throw ContractError("column '" + c.name + "' has no dictionary");
  }
  if (labels && labels->size() != n) throw ContractError("label length mismatch");
  if (labels) {
    for (auto v : *labels) {
      if (v != 0 && v != 1) throw ContractError("labels must be 0/1");
    }
  }
  if (months && months->size() != n) throw ContractError("month length mismatch");
  std::vector<std::int64_t> ids = row_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ContractError("row ids are not unique");
  }
  for (const auto& col : schema.columns) {
    const bool found = col.kind == ColumnKind::numeric
                           ? std::any_of(numeric_cols.begin(), numeric_cols.end(),
                                         [&](const auto& c) { return c.name == col.name; })
                           : std::any_of(categorical_cols.begin(), categorical_cols.end(),
                                         [&](const auto& c) { return c.name == col.name; });
    if (!found) throw SchemaError("schema column '" + col.name + "' has no data");
  }
}

FeatureMatrixView::FeatureMatrixView(const TabularDataset& d) : ds(&d) {
  numeric.resize(d.schema.columns.size(), nullptr);
  categorical.resize(d.schema.columns.size(), nullptr);
  for (std::size_t f = 0; f < d.schema.columns.size(); ++f) {
    const auto& col = d.schema.columns[f];
    if (col.kind == ColumnKind::numeric) {
      numeric[f] = &d.numeric(col.name);
    } else {
      categorical[f] = &d.categorical(col.name);
    }
  }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

// RFC-4180 reader over an in-memory buffer. Handles quoted fields with
// embedded separators/newlines and doubled quotes; accepts \n and \r\n.
class CsvReader {
 public:
  explicit CsvReader(std::string text) : text_(std::move(text)) {}

  bool next_record(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
          } else {
            in_quotes = false;
            ++pos_;
          }
        } else {
          field.push_back(c);
          ++pos_;
        }
        continue;
      }
      if (c == '"' && field.empty()) {
        in_quotes = true;
        any = true;
        ++pos_;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        any = true;
        ++pos_;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(c);
        any = true;
        ++pos_;
      }
    }
    if (any || !field.empty() || !fields.empty()) {
      fields.push_back(std::move(field));
      return true;
    }
    return false;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out) {
  std::string s = trim(raw);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

class DictBuilder {
 public:
  std::int32_t add(const std::string& value) {
    auto it = index_.find(value);
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::int32_t>(values_.size());
    values_.push_back(value);
    index_.emplace(value, id);
    return id;
  }
  std::shared_ptr<const CategoryDict> freeze() {
    return std::make_shared<const CategoryDict>(std::move(values_));
  }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace

TabularDataset load_csv(const std::string& path, const FeatureSchema& schema,
                        const TabularDataset* dict_source) {
  schema.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  CsvReader reader(buf.str());

  std::vector<std::string> header;
  if (!reader.next_record(header)) throw EmptyInputError("'" + path + "' is empty");

  std::unordered_map<std::string, std::size_t> col_pos;
  for (std::size_t i = 0; i < header.size(); ++i) col_pos[trim(header[i])] = i;

  struct Slot {
    const ColumnSpec* spec;
    std::size_t csv_index;
  };
  std::vector<Slot> slots;
  for (const auto& c : schema.columns) {
    auto it = col_pos.find(c.name);
    if (it == col_pos.end()) throw SchemaError("column '" + c.name + "' missing from '" + path + "'");
    slots.push_back({&c, it->second});
  }
  auto optional_pos = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = col_pos.find(name);
    if (it == col_pos.end()) return std::nullopt;
    return it->second;
  };
  auto label_pos = optional_pos(schema.label_column);
  std::optional<std::size_t> month_pos;
  if (schema.month_column) month_pos = optional_pos(*schema.month_column);

  TabularDataset ds;
  ds.schema = schema;
  std::vector<DictBuilder> builders;
  std::vector<std::shared_ptr<const CategoryDict>> fixed_dicts;
  for (const auto& c : schema.columns) {
    if (c.kind == ColumnKind::numeric) {
      ds.numeric_cols.push_back({c.name, {}});
    } else {
      std::shared_ptr<const CategoryDict> fixed;
      if (dict_source) {
        for (const auto& sc : dict_source->categorical_cols) {
          if (sc.name == c.name) fixed = sc.dict;
        }
        if (!fixed) throw SchemaError("dictionary source has no column '" + c.name + "'");
      }
      fixed_dicts.push_back(fixed);
      builders.emplace_back();
      ds.categorical_cols.push_back({c.name, {}, nullptr});
    }
  }

  std::vector<std::string> label_raw;
  DictBuilder label_builder;
  std::vector<std::int32_t> label_codes;
  std::vector<MonthStamp> months;

  std::vector<std::string> rec;
  std::size_t row = 0;
  while (reader.next_record(rec)) {
    ++row;
    if (rec.size() == 1 && rec[0].empty()) continue;  // stray blank line
    if (rec.size() < header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(rec.size()));
    }
    std::size_t num_i = 0, cat_i = 0;
    for (const auto& slot : slots) {
      const std::string& cell = rec[slot.csv_index];
      if (slot.spec->kind == ColumnKind::numeric) {
        double v;
        if (trim(cell).empty()) {
          if (!slot.spec->missing_allowed) {
            throw ParseError("row " + std::to_string(row) + ", column '" +
                             slot.spec->name + "': missing value not allowed");
          }
          v = missing_value();
        } else if (!parse_double(cell, v)) {
          throw ParseError("row " + std::to_string(row) + ", column '" +
                           slot.spec->name + "': cannot parse '" + cell + "' as number");
        }
        ds.numeric_cols[num_i++].values.push_back(v);
      } else {
        std::int32_t code;
        std::string v = trim(cell);
        if (v.empty()) {
          if (!slot.spec->missing_allowed) {
            throw ParseError("row " + std::to_string(row) + ", column '" +
                             slot.spec->name + "': missing value not allowed");
          }
          code = kMissingCategory;
        } else if (fixed_dicts[cat_i]) {
          code = fixed_dicts[cat_i]->find(v);
        } else {
          code = builders[cat_i].add(v);
        }
        ds.categorical_cols[cat_i].codes.push_back(code);
        ++cat_i;
      }
    }
    if (label_pos) {
      std::string v = trim(rec[*label_pos]);
      label_raw.push_back(v);
      label_codes.push_back(v.empty() ? kMissingCategory : label_builder.add(v));
    }
    if (month_pos) {
      const std::string v = trim(rec[*month_pos]);
      if (v.empty()) {
        throw ParseError("row " + std::to_string(row) + ": empty month stamp");
      }
      months.push_back(MonthStamp::parse(v));
    }
  }
  if (row == 0) throw EmptyInputError("'" + path + "' has a header but no data rows");

  std::size_t cat_i = 0;
  for (auto& c : ds.categorical_cols) {
    c.dict = fixed_dicts[cat_i] ? fixed_dicts[cat_i] : builders[cat_i].freeze();
    ++cat_i;
  }
  ds.row_ids.resize(row);
  for (std::size_t i = 0; i < row; ++i) ds.row_ids[i] = static_cast<std::int64_t>(i);

  if (label_pos) {
    bool binary = std::all_of(label_raw.begin(), label_raw.end(),
                              [](const std::string& v) { return v == "0" || v == "1"; });
    if (binary) {
      std::vector<std::int8_t> labels(row);
      for (std::size_t i = 0; i < row; ++i) labels[i] = label_raw[i] == "1" ? 1 : 0;
      ds.labels = std::move(labels);
    } else {
      ds.raw_label = CategoricalColumn{schema.label_column, std::move(label_codes),
                                       label_builder.freeze()};
    }
  }
  if (month_pos) ds.months = std::move(months);
  ds.check_consistent();
  return ds;
}

void write_csv(const TabularDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  FeatureMatrixView view(ds);

  std::string header;
  for (const auto& c : ds.schema.columns) {
    if (!header.empty()) header += ",";
    header += csv_escape(c.name);
  }
  const bool has_label = ds.labels.has_value() || ds.raw_label.has_value();
  if (has_label) header += "," + csv_escape(ds.schema.label_column);
  if (ds.months && ds.schema.month_column) header += "," + csv_escape(*ds.schema.month_column);
  out << header << "\n";

  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    std::string line;
    for (std::size_t f = 0; f < view.n_features(); ++f) {
      if (f > 0) line += ",";
      if (view.is_categorical(f)) {
        std::int32_t code = view.categorical[f]->codes[i];
        if (code >= 0) line += csv_escape(view.categorical[f]->dict->value(code));
      } else {
        double v = view.numeric[f]->values[i];
        if (!is_missing(v)) line += format_double(v);
      }
    }
    if (has_label) {
      line += ",";
      if (ds.labels) {
        line += (*ds.labels)[i] ? "1" : "0";
      } else {
        std::int32_t code = ds.raw_label->codes[i];
        if (code >= 0) line += csv_escape(ds.raw_label->dict->value(code));
      }
    }
    if (ds.months && ds.schema.month_column) {
      line += "," + (*ds.months)[i].str();
    }
    out << line << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Lending Club pipeline
// ---------------------------------------------------------------------------

TabularDataset encode_loan_status(const TabularDataset& ds) {
  if (!ds.raw_label) {
    throw SchemaError("dataset has no raw '" + ds.schema.label_column +
                      "' column to encode");
  }
  const auto& col = *ds.raw_label;
  const std::int32_t pos_code = col.dict->find("Charged Off");
  const std::int32_t neg_code = col.dict->find("Fully Paid");

  std::vector<std::size_t> keep;
  std::vector<std::int8_t> labels;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    std::int32_t c = col.codes[i];
    if (c == pos_code && pos_code != kUnknownCategory) {
      keep.push_back(i);
      labels.push_back(1);
    } else if (c == neg_code && neg_code != kUnknownCategory) {
      keep.push_back(i);
      labels.push_back(0);
    }
  }
  TabularDataset out = ds.select_rows(keep);
  out.raw_label.reset();
  out.labels = std::move(labels);
  return out;
}

namespace {

// "<1 year"/"< 1 year" -> 0, "1 year" -> 1, ..., "10+ years" -> 10.
// "n/a" (any case) -> missing.
double map_emp_length(const std::string& raw, bool& missing) {
  missing = false;
  std::string s = trim(raw);
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.empty() || lower == "n/a" || lower == "na") {
    missing = true;
    return 0.0;
  }
  if (lower.rfind("< 1", 0) == 0 || lower.rfind("<1", 0) == 0) return 0.0;
  if (lower.rfind("10+", 0) == 0) return 10.0;
  int v = 0;
  auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), v);
  if (ec == std::errc{} && v >= 0 && v <= 10) {
    (void)ptr;
    return static_cast<double>(v);
  }
  throw ParseError("unrecognized emp_length value '" + s + "'");
}

// "Apr-1999", "1999-04" or "1999" -> 1999.
double map_credit_line_year(const std::string& raw, bool& missing) {
  missing = false;
  std::string s = trim(raw);
  if (s.empty()) {
    missing = true;
    return 0.0;
  }
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 2])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 3]))) {
      int y = (s[i] - '0') * 1000 + (s[i + 1] - '0') * 100 + (s[i + 2] - '0') * 10 +
              (s[i + 3] - '0');
      return static_cast<double>(y);
    }
  }
  throw ParseError("cannot extract a year from earliest_cr_line value '" + s + "'");
}

// Strips a "%" suffix or a "months" suffix before numeric parse.
double map_suffixed_number(const std::string& raw, const char* column, bool& missing) {
  missing = false;
  std::string s = trim(raw);
  if (s.empty()) {
    missing = true;
    return 0.0;
  }
  if (!s.empty() && s.back() == '%') s = trim(s.substr(0, s.size() - 1));
  auto suffix = s.rfind("months");
  if (suffix != std::string::npos) s = trim(s.substr(0, suffix));
  double v;
  if (!parse_double(s, v)) {
    throw ParseError(std::string("cannot parse ") + column + " value '" + raw + "'");
  }
  return v;
}

// Replaces a categorical column with a numeric one using a per-dictionary-value
// mapping, evaluated once per distinct value.
template <typename MapFn>
NumericColumn decode_categorical(const CategoricalColumn& col, const std::string& new_name,
                                 MapFn&& fn) {
  std::vector<double> mapped(col.dict->size());
  std::vector<bool> mapped_missing(col.dict->size());
  for (std::size_t i = 0; i < col.dict->size(); ++i) {
    bool miss = false;
    mapped[i] = fn(col.dict->values()[i], miss);
    mapped_missing[i] = miss;
  }
  NumericColumn out{new_name, {}};
  out.values.reserve(col.codes.size());
  for (auto code : col.codes) {
    if (code < 0 || mapped_missing[static_cast<std::size_t>(code)]) {
      out.values.push_back(missing_value());
    } else {
      out.values.push_back(mapped[static_cast<std::size_t>(code)]);
    }
  }
  return out;
}

double log10_plus_one(double v) { return std::log10(v + 1.0); }

}  // namespace

TabularDataset preprocess_lending_club(const TabularDataset& ds) {
  for (const char* required :
       {"emp_length", "fico_range_low", "fico_range_high", "annual_inc", "revol_bal"}) {
    if (!ds.schema.find(required)) {
      throw SchemaError(std::string("preprocess requires column '") + required + "'");
    }
  }

  TabularDataset out;
  out.labels = ds.labels;
  out.months = ds.months;
  out.raw_label = ds.raw_label;
  out.provenance = ds.provenance;
  out.row_ids = ds.row_ids;
  out.schema.label_column = ds.schema.label_column;
  out.schema.month_column = ds.schema.month_column;

  const auto& fico_low = ds.numeric("fico_range_low");
  const auto& fico_high = ds.numeric("fico_range_high");

  auto push_numeric = [&](NumericColumn col, bool missing_allowed) {
    out.schema.columns.push_back({col.name, ColumnKind::numeric, missing_allowed});
    out.numeric_cols.push_back(std::move(col));
  };

  for (const auto& spec : ds.schema.columns) {
    const std::string& name = spec.name;
    if (name == "fico_range_high") continue;  // folded into fico_score below
    if (name == "fico_range_low") {
      NumericColumn fico{"fico_score", {}};
      fico.values.reserve(ds.n_rows());
      for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        double lo = fico_low.values[i], hi = fico_high.values[i];
        fico.values.push_back(is_missing(lo) || is_missing(hi) ? missing_value()
                                                               : (lo + hi) / 2.0);
      }
      push_numeric(std::move(fico), spec.missing_allowed);
      continue;
    }
    if (name == "annual_inc" || name == "revol_bal") {
      const auto& src = ds.numeric(name);
      NumericColumn logged{name == "annual_inc" ? "log_annual_inc" : "log_revol_bal", {}};
      logged.values.reserve(ds.n_rows());
      for (double v : src.values) {
        logged.values.push_back(is_missing(v) ? missing_value() : log10_plus_one(v));
      }
      push_numeric(std::move(logged), spec.missing_allowed);
      continue;
    }
    if (name == "emp_length") {
      if (spec.kind == ColumnKind::categorical) {
        push_numeric(decode_categorical(ds.categorical(name), name, map_emp_length),
                     spec.missing_allowed);
      } else {
        push_numeric(ds.numeric(name), spec.missing_allowed);
      }
      continue;
    }
    if (name == "earliest_cr_line" && spec.kind == ColumnKind::categorical) {
      push_numeric(decode_categorical(ds.categorical(name), name, map_credit_line_year),
                   spec.missing_allowed);
      continue;
    }
    if ((name == "term" || name == "int_rate" || name == "revol_util") &&
        spec.kind == ColumnKind::categorical) {
      auto fn = [&name](const std::string& raw, bool& miss) {
        return map_suffixed_number(raw, name.c_str(), miss);
      };
      push_numeric(decode_categorical(ds.categorical(name), name, fn), spec.missing_allowed);
      continue;
    }
    // untouched column
    out.schema.columns.push_back(spec);
    if (spec.kind == ColumnKind::numeric) {
      out.numeric_cols.push_back(ds.numeric(name));
    } else {
      out.categorical_cols.push_back(ds.categorical(name));
    }
  }
  out.check_consistent();
  return out;
}

std::pair<TabularDataset, TabularDataset> split_by_month(const TabularDataset& ds,
                                                         MonthStamp first_test_month) {
  if (!ds.months) throw SchemaError("dataset has no month stamps");
  std::vector<std::size_t> before, after;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    ((*ds.months)[i] < first_test_month ? before : after).push_back(i);
  }
  return {ds.select_rows(before), ds.select_rows(after)};
}

// ---------------------------------------------------------------------------
// summarize
// ---------------------------------------------------------------------------

namespace {

ColumnSummary summarize_values(const std::string& name, std::vector<double> values,
                               std::size_t n_rows) {
  ColumnSummary s;
  s.name = name;
  s.count = values.size();
  s.missing = n_rows - values.size();
  if (values.empty()) return s;

  std::sort(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  s.min = values.front();
  s.max = values.back();
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values[lo];
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
  };
  s.q25 = quantile(0.25);
  s.q50 = quantile(0.50);
  s.q75 = quantile(0.75);
  s.moments_defined = true;
  return s;
}

}  // namespace

std::vector<ColumnSummary> summarize(const TabularDataset& ds) {
  std::vector<ColumnSummary> out;
  for (const auto& col : ds.schema.columns) {
    if (col.kind != ColumnKind::numeric) continue;
    const auto& c = ds.numeric(col.name);
    std::vector<double> present;
    present.reserve(c.values.size());
    for (double v : c.values) {
      if (!is_missing(v)) present.push_back(v);
    }
    out.push_back(summarize_values(c.name, std::move(present), ds.n_rows()));
  }
  if (ds.labels) {
    std::vector<double> l(ds.labels->begin(), ds.labels->end());
    out.push_back(summarize_values(ds.schema.label_column, std::move(l), ds.n_rows()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// dataset JSON file format
// ---------------------------------------------------------------------------

void save_dataset(const TabularDataset& ds, const std::string& path) {
  json j;
  j["format"] = "driftgate.dataset.v1";
  j["schema"] = json::parse(ds.schema.to_json_string());
  j["row_ids"] = ds.row_ids;
  if (ds.labels) j["labels"] = std::vector<int>(ds.labels->begin(), ds.labels->end());
  if (ds.months) {
    std::vector<std::string> m;
    m.reserve(ds.months->size());
    for (const auto& ms : *ds.months) m.push_back(ms.str());
    j["months"] = m;
  }
  json numeric = json::array();
  for (const auto& c : ds.numeric_cols) {
    json values = json::array();
    for (double v : c.values) {
      if (is_missing(v)) values.push_back(nullptr);
      else values.push_back(v);
    }
    numeric.push_back({{"name", c.name}, {"values", values}});
  }
  j["numeric"] = numeric;
  auto cat_to_json = [](const CategoricalColumn& c) {
    return json{{"name", c.name}, {"dict", c.dict->values()}, {"codes", c.codes}};
  };
  json categorical = json::array();
  for (const auto& c : ds.categorical_cols) categorical.push_back(cat_to_json(c));
  j["categorical"] = categorical;
  if (ds.raw_label) j["raw_label"] = cat_to_json(*ds.raw_label);
  if (ds.provenance) {
    json src = json::array(), ids = json::array();
    for (const auto& p : *ds.provenance) {
      src.push_back(static_cast<int>(p.source));
      ids.push_back(p.row_id);
    }
    j["provenance"] = {{"source", src}, {"row_id", ids}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump() << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

TabularDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("dataset file '" + path + "': " + e.what());
  }
  if (j.value("format", std::string()) != "driftgate.dataset.v1") {
    throw ParseError("'" + path + "' is not a driftgate dataset file");
  }
  TabularDataset ds;
  ds.schema = FeatureSchema::from_json_string(j.at("schema").dump());
  ds.row_ids = j.at("row_ids").get<std::vector<std::int64_t>>();
  if (j.contains("labels")) {
    auto ints = j["labels"].get<std::vector<int>>();
    ds.labels = std::vector<std::int8_t>(ints.begin(), ints.end());
  }
  if (j.contains("months")) {
    std::vector<MonthStamp> m;
    for (const auto& s : j["months"]) m.push_back(MonthStamp::parse(s.get<std::string>()));
    ds.months = std::move(m);
  }
  for (const auto& c : j.at("numeric")) {
    NumericColumn nc{c.at("name").get<std::string>(), {}};
    for (const auto& v : c.at("values")) {
      nc.values.push_back(v.is_null() ? missing_value() : v.get<double>());
    }
    ds.numeric_cols.push_back(std::move(nc));
  }
  auto cat_from_json = [](const json& c) {
    CategoricalColumn cc{c.at("name").get<std::string>(),
                         c.at("codes").get<std::vector<std::int32_t>>(),
                         std::make_shared<const CategoryDict>(
                             c.at("dict").get<std::vector<std::string>>())};
    return cc;
  };
  for (const auto& c : j.at("categorical")) ds.categorical_cols.push_back(cat_from_json(c));
  if (j.contains("raw_label")) ds.raw_label = cat_from_json(j["raw_label"]);
  if (j.contains("provenance")) {
    auto src = j["provenance"].at("source").get<std::vector<int>>();
    auto ids = j["provenance"].at("row_id").get<std::vector<std::int64_t>>();
    std::vector<RowOrigin> prov(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      prov[i] = {static_cast<std::int8_t>(src[i]), ids[i]};
    }
    ds.provenance = std::move(prov);
  }
  ds.check_consistent();
  return ds;
}

}  // namespace driftgate
