#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace respira::csv {

using Row = std::vector<std::string>;

/// Splits one CSV line; supports double-quoted fields with "" escapes.
Row split_line(std::string_view line);

/// Reads a whole CSV file (header included as row 0). Blank lines are skipped.
std::vector<Row> read_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const Row& row);

/// Shortest round-trippable text for a double.
std::string format_double(double v);

} // namespace respira::csv
