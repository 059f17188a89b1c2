#pragma once

// Number formatting and tokenizing shared by the text readers and writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mechpf::detail {

/// Shortest representation that reads back exactly when digits == 0.
std::string format_number(double value, int digits = 0);

/// Whole-token decimal parse; accepts a leading '+'. Infinities and NaN are
/// returned as parsed, callers decide whether they are acceptable.
std::optional<double> parse_number(std::string_view token);

std::vector<std::string_view> split_whitespace(std::string_view line);

/// Splits on LF, dropping one trailing CR per line. A final terminator does
/// not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace mechpf::detail
