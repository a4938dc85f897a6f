#include "boolsearch/date.hpp"

#include <charconv>
#include <cstdio>

#include "boolsearch/errors.hpp"

namespace boolsearch {

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t width) {
  int value = 0;
  auto first = text.data() + pos;
  auto last = first + width;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DataError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const Date date{std::chrono::year{parse_fixed(text, 0, 4)},
                  std::chrono::month{static_cast<unsigned>(parse_fixed(text, 5, 2))},
                  std::chrono::day{static_cast<unsigned>(parse_fixed(text, 8, 2))}};
  if (!date.ok()) {
    throw DataError("invalid calendar date '" + std::string(text) + "'");
  }
  return date;
}

std::string format_date(Date date) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buffer;
}

}  // namespace boolsearch
