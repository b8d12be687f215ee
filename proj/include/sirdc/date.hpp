#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sirdc {

using Date = std::chrono::sys_days;

/// Accepts ISO-8601 (2020-03-21), compact (20200321) and JHU style
/// (3/21/20 or 3/21/2020). Throws DataError on anything else.
Date parse_date(std::string_view text);

/// Returns true and writes `out` when `text` parses as a date.
bool try_parse_date(std::string_view text, Date& out);

/// ISO-8601 rendering.
std::string format_date(Date d);

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

/// Default policy floor for day one.
inline Date default_day_one_floor() { return make_date(2020, 3, 21); }

}  // namespace sirdc
