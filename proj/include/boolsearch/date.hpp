#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace boolsearch {

using Date = std::chrono::year_month_day;

/// Parses `YYYY-MM-DD`. Throws DataError on anything else or an invalid calendar day.
Date parse_date(std::string_view text);

/// Renders `YYYY-MM-DD`.
std::string format_date(Date date);

}  // namespace boolsearch
