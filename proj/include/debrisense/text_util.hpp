#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace debrisense {

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);
std::string format_number_list(const std::vector<double>& values, std::string_view sep = ", ");

/// Strict parse; ConfigError on trailing garbage or empty input. Accepts inf/nan.
double parse_number(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

}  // namespace debrisense
