#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dabc::text {

/// Replaces every invalid UTF-8 sequence with U+FFFD. Valid input is returned unchanged.
std::string sanitize_utf8(std::string_view bytes);

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);

/// Splits on '\n'. A trailing newline does not produce an empty last line;
/// '\r' before '\n' is dropped.
std::vector<std::string_view> split_lines(std::string_view s);

/// Width of the leading whitespace, tabs expanded to multiples of 8.
std::size_t indent_width(std::string_view line);

bool is_blank(std::string_view line);

/// Collapses runs of whitespace into single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

bool is_identifier(std::string_view s);

std::string to_lower(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace dabc::text
