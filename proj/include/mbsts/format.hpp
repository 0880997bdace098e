#pragma once

#include <string>

namespace mbsts {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict full-string parse; throws ConfigError naming `what` on failure.
double parse_double(const std::string& text, const std::string& what);

}  // namespace mbsts
