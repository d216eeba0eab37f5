#include "driftgate/month.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "driftgate/errors.hpp"

namespace driftgate {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::string MonthStamp::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

MonthStamp MonthStamp::parse(std::string_view text) {
  size_t sep = text.find_first_of("-M");
  int y = 0, m = 0;
  if (sep == std::string_view::npos || sep == 0 || sep + 1 >= text.size() ||
      !parse_int(text.substr(0, sep), y) ||
      !parse_int(text.substr(sep + 1), m)) {
    throw ParseError("invalid month stamp '" + std::string(text) +
                     "' (expected YYYY-MM or YYYYMmm)");
  }
  if (m < 1 || m > 12) {
    throw ParseError("month out of range in '" + std::string(text) + "'");
  }
  return MonthStamp{y, m};
}

}  // namespace driftgate
