#pragma once

#include <optional>
#include <string>

namespace ttf {

/// Shortest decimal that parses back to exactly `x`.
std::string format_double(double x);

/// Empty string when absent.
std::string format_double(const std::optional<double>& x);

} // namespace ttf
