#pragma once

// Shared builders for test fixtures.

#include <string>
#include <vector>

#include "driftgate/dataset.hpp"

namespace driftgate::testing {

/// Numeric-only labeled dataset; columns are equal-length value vectors.
inline TabularDataset make_dataset(const std::vector<std::vector<double>>& columns,
                                   const std::vector<std::int8_t>& labels,
                                   const std::vector<MonthStamp>& months = {}) {
  TabularDataset ds;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    std::string name = "f" + std::to_string(j);
    ds.schema.columns.push_back({name, ColumnKind::numeric, true});
    ds.numeric_cols.push_back({name, columns[j]});
  }
  ds.schema.label_column = "y";
  if (!labels.empty()) ds.labels = labels;
  if (!months.empty()) {
    ds.schema.month_column = "month";
    ds.months = months;
  }
  ds.row_ids.resize(columns.at(0).size());
  for (std::size_t i = 0; i < ds.row_ids.size(); ++i) {
    ds.row_ids[i] = static_cast<std::int64_t>(i);
  }
  ds.check_consistent();
  return ds;
}

}  // namespace driftgate::testing
