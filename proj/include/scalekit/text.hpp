#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scalekit::text {

// Shortest-round-trip style formatting for CSV output: %.17g always
// reparses to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on commas; no quoting rules, fields are trimmed. Good enough
// for the numeric tables this toolkit reads and writes.
std::vector<std::string> split_csv(std::string_view line);

}  // namespace scalekit::text
