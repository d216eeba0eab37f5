#pragma once

#include <optional>
#include <string>
#include <vector>

namespace driftgate {

enum class ColumnKind { numeric, categorical };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  bool missing_allowed = true;

  bool operator==(const ColumnSpec&) const = default;
};

/// Describes the feature columns of a table plus the designated label and
/// (optional) month columns. The label/month columns are not features.
struct FeatureSchema {
  std::vector<ColumnSpec> columns;
  std::string label_column;
  std::optional<std::string> month_column;

  bool operator==(const FeatureSchema&) const = default;

  const ColumnSpec* find(const std::string& name) const;

  /// Throws SchemaError when names collide or the label column is listed as a
  /// feature.
  void validate() const;

  std::string to_json_string() const;
  static FeatureSchema from_json_string(const std::string& text);
  static FeatureSchema load(const std::string& path);
  void save(const std::string& path) const;
};

/// The 24 raw Lending Club input columns (with loan_status as label).
FeatureSchema lending_club_raw_schema();

}  // namespace driftgate
