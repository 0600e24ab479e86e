#include "debrisense/text_util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "debrisense/common.hpp"

namespace debrisense {

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw Error("format_number: conversion failed");
    return std::string(buf, end);
}

std::string format_number_list(const std::vector<double>& values, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        out += format_number(values[i]);
    }
    return out;
}

std::string trim(std::string_view text)
{
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto b = std::find_if_not(text.begin(), text.end(), is_space);
    auto e = std::find_if_not(text.rbegin(), text.rend(), is_space).base();
    return b < e ? std::string(b, e) : std::string();
}

std::string to_lower(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double parse_number(std::string_view text)
{
    std::string t = trim(text);
    std::string lower = to_lower(t);
    if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();
    if (lower == "-inf") return -std::numeric_limits<double>::infinity();
    if (lower == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + t + "'");
    return value;
}

std::vector<std::string> split_list(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string item = trim(text.substr(start, pos - start));
        if (!item.empty()) out.push_back(std::move(item));
        start = pos + 1;
    }
    return out;
}

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_number(item));
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

}  // namespace debrisense
