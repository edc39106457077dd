#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dabc::csv {

using Row = std::vector<std::string>;

// RFC 4180: quoted fields may hold commas, quotes ("") and newlines.
// Throws dabc::Error on an unterminated quote.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace dabc::csv
