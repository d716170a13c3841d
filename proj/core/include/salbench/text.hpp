#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace salbench::text {

// Shortest decimal form that round-trips to the same double; "nan", "inf"
// and "-inf" for non-finite values.
std::string format_double(double v);

// Fixed notation with `digits` decimals.
std::string format_fixed(double v, int digits);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Whole-field parses; false on empty input or trailing characters.
bool parse_double(std::string_view s, double& out);
bool parse_size(std::string_view s, std::size_t& out);

}  // namespace salbench::text
