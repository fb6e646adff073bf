#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace efda {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Strict full-string parse; surrounding blanks are allowed.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace efda
