#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace driftgate {

/// A calendar month, totally ordered by (year, month).
/// Accepted text forms: "2018-01" and the compact "2018M1".
struct MonthStamp {
  int year = 0;
  int month = 1;  // 1..12

  auto operator<=>(const MonthStamp&) const = default;

  /// Months since year 0; handy for ranges and arithmetic.
  int index() const { return year * 12 + (month - 1); }

  static MonthStamp from_index(int idx) {
    return MonthStamp{idx / 12, idx % 12 + 1};
  }

  MonthStamp plus(int n) const { return from_index(index() + n); }

  /// Canonical "YYYY-MM" form; parse(str(m)) == m.
  std::string str() const;

  /// Throws ParseError on malformed input.
  static MonthStamp parse(std::string_view text);
};

}  // namespace driftgate
