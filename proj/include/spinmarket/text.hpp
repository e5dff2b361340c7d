#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spinmarket {

/// Shortest text that parses back to exactly v.
std::string format_double(double v);

/// Full-string parse; throws io_error mentioning what on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);

} // namespace spinmarket
