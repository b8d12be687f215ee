#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sirdc::csv {

/// Splits text into records of fields. Handles double-quoted fields with
/// embedded commas and "" escapes; tolerates CRLF and a UTF-8 BOM.
std::vector<std::vector<std::string>> parse(std::string_view text);

/// Shortest round-trip decimal for a double; integers render without a point.
std::string format_number(double v);

/// Parses a numeric cell; returns false for blanks and junk.
bool parse_number(std::string_view cell, double& out);

std::string join(const std::vector<std::string>& fields);

}  // namespace sirdc::csv
