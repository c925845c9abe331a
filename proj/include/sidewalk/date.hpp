#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sidewalk {

using Date = std::chrono::year_month_day;

// Accepts "YYYY-MM-DD", optionally followed by a "T..." time part which is
// ignored. Throws FormatError on anything else.
Date parse_date(std::string_view text);

std::string format_date(Date d);

Date today_utc();

struct DateInterval {
  Date start;
  Date end;

  bool contains(Date const d) const { return start <= d && d <= end; }
  friend bool operator==(DateInterval const&, DateInterval const&) = default;
};

}  // namespace sidewalk
