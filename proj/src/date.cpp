#include "sirdc/date.hpp"

#include <charconv>
#include <cstdio>

#include "sirdc/error.hpp"

namespace sirdc {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool build(int y, int m, int d, Date& out) {
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = Date{ymd};
  return true;
}

}  // namespace

bool try_parse_date(std::string_view text, Date& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r'))
    text.remove_suffix(1);

  int y = 0, m = 0, d = 0;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    return parse_int(text.substr(0, 4), y) && parse_int(text.substr(5, 2), m) &&
           parse_int(text.substr(8, 2), d) && build(y, m, d, out);
  }
  if (text.size() == 8 && text.find_first_not_of("0123456789") == std::string_view::npos) {
    return parse_int(text.substr(0, 4), y) && parse_int(text.substr(4, 2), m) &&
           parse_int(text.substr(6, 2), d) && build(y, m, d, out);
  }
  auto s1 = text.find('/');
  if (s1 == std::string_view::npos) return false;
  auto s2 = text.find('/', s1 + 1);
  if (s2 == std::string_view::npos) return false;
  if (!parse_int(text.substr(0, s1), m) || !parse_int(text.substr(s1 + 1, s2 - s1 - 1), d) ||
      !parse_int(text.substr(s2 + 1), y))
    return false;
  if (text.size() - s2 - 1 == 2) y += 2000;
  return build(y, m, d, out);
}

Date parse_date(std::string_view text) {
  Date d;
  if (!try_parse_date(text, d)) throw DataError("unparseable date '" + std::string(text) + "'");
  return d;
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace sirdc
