#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "driftgate/month.hpp"
#include "driftgate/schema.hpp"

namespace driftgate {

inline constexpr std::int32_t kMissingCategory = -1;
/// Category seen at encode time but absent from the dictionary (e.g. a test
/// value unseen in training). Routed like a missing value by the learner.
inline constexpr std::int32_t kUnknownCategory = -2;

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return v != v; }

/// Immutable string<->id dictionary for one categorical column.
class CategoryDict {
 public:
  explicit CategoryDict(std::vector<std::string> values);
  std::int32_t find(const std::string& value) const;  // kUnknownCategory if absent
  const std::string& value(std::int32_t code) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<std::string>& values() const { return values_; }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct NumericColumn {
  std::string name;
  std::vector<double> values;  // NaN = missing
};

struct CategoricalColumn {
  std::string name;
  std::vector<std::int32_t> codes;  // >= 0 dictionary id, or kMissing/kUnknown
  std::shared_ptr<const CategoryDict> dict;
};

/// Where a row of a derived (e.g. adversarial) dataset came from.
struct RowOrigin {
  std::int8_t source = 0;  // 0 = first input, 1 = second
  std::int64_t row_id = 0;
};

/// Column-major table. Feature columns follow schema order; the label and
/// month columns live in dedicated fields. Immutable by convention after
/// construction; row-level operations return new datasets and always preserve
/// row_ids.
struct TabularDataset {
  FeatureSchema schema;
  std::vector<NumericColumn> numeric_cols;
  std::vector<CategoricalColumn> categorical_cols;
  std::optional<std::vector<std::int8_t>> labels;  // 0/1
  std::optional<std::vector<MonthStamp>> months;
  /// Unencoded label column (e.g. raw loan_status strings) pending
  /// encode_loan_status. Never used as a feature.
  std::optional<CategoricalColumn> raw_label;
  std::optional<std::vector<RowOrigin>> provenance;
  std::vector<std::int64_t> row_ids;

  std::size_t n_rows() const { return row_ids.size(); }
  std::size_t n_features() const { return schema.columns.size(); }

  const NumericColumn& numeric(const std::string& name) const;
  const CategoricalColumn& categorical(const std::string& name) const;

  /// New dataset holding the given row positions, ids preserved.
  TabularDataset select_rows(std::span<const std::size_t> positions) const;

  /// Position of each row id; throws ContractError on unknown ids.
  std::vector<std::size_t> positions_of(std::span<const std::int64_t> ids) const;

  void check_consistent() const;
};

/// One row's feature values in schema order; used by the learner.
struct FeatureMatrixView {
  const TabularDataset* ds = nullptr;
  std::vector<const NumericColumn*> numeric;        // per schema column, or null
  std::vector<const CategoricalColumn*> categorical;  // per schema column, or null

  explicit FeatureMatrixView(const TabularDataset& d);
  std::size_t n_rows() const { return ds->n_rows(); }
  std::size_t n_features() const { return ds->schema.columns.size(); }
  bool is_categorical(std::size_t f) const { return categorical[f] != nullptr; }
};

// ---- operations ----

/// Parse an RFC-4180 CSV against the schema. Header required; order
/// insensitive; empty cell = missing. When `dict_source` is given its
/// category dictionaries are reused and unseen strings map to
/// kUnknownCategory; otherwise dictionaries are built from the file.
TabularDataset load_csv(const std::string& path, const FeatureSchema& schema,
                        const TabularDataset* dict_source = nullptr);

void write_csv(const TabularDataset& ds, const std::string& path);

/// Charged Off -> 1, Fully Paid -> 0, everything else dropped.
TabularDataset encode_loan_status(const TabularDataset& ds);

/// The Lending Club feature pipeline: emp_length -> 0..10, FICO bounds
/// averaged into fico_score, annual_inc/revol_bal log10-transformed,
/// earliest_cr_line reduced to its year, percent/"NN months" text coerced.
/// Output has exactly 23 feature columns.
TabularDataset preprocess_lending_club(const TabularDataset& ds);

/// (rows strictly before `first_test_month`, rows at or after).
std::pair<TabularDataset, TabularDataset> split_by_month(const TabularDataset& ds,
                                                         MonthStamp first_test_month);

struct ColumnSummary {
  std::string name;
  std::size_t count = 0;    // non-missing
  std::size_t missing = 0;
  double mean = 0, std_dev = 0, min = 0, q25 = 0, q50 = 0, q75 = 0, max = 0;
  bool moments_defined = false;  // false when count == 0 (or < 2 for std)
};

/// Per-column stats over non-missing values (sample std; linear-interpolated
/// quartiles). Numeric columns plus the encoded label.
std::vector<ColumnSummary> summarize(const TabularDataset& ds);

// ---- dataset file format (JSON, documented in README) ----

void save_dataset(const TabularDataset& ds, const std::string& path);
TabularDataset load_dataset(const std::string& path);

}  // namespace driftgate
