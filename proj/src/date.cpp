#include "sidewalk/date.hpp"

#include <charconv>
#include <cstdio>

#include "sidewalk/error.hpp"

namespace sidewalk {

namespace {

int parse_field(std::string_view const text, std::size_t const pos,
                std::size_t const len) {
  auto value = 0;
  auto const* first = text.data() + pos;
  auto const* last = first + len;
  auto const [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw FormatError("invalid date '" + std::string{text} + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() > 10 && text[10] == 'T') {
    text = text.substr(0, 10);
  }
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw FormatError("invalid date '" + std::string{text} +
                      "', expected YYYY-MM-DD");
  }
  auto const d = Date{std::chrono::year{parse_field(text, 0, 4)},
                      std::chrono::month{static_cast<unsigned>(parse_field(text, 5, 2))},
                      std::chrono::day{static_cast<unsigned>(parse_field(text, 8, 2))}};
  if (!d.ok()) {
    throw FormatError("invalid calendar date '" + std::string{text} + "'");
  }
  return d;
}

std::string format_date(Date const d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date today_utc() {
  return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

}  // namespace sidewalk
