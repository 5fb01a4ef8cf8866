#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polydawg {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest representation that parses back to the same double.
std::string format_double(double d);

/// Escapes backslash, tab, newline and carriage return for TSV cells.
std::string escape_tsv(std::string_view s);
/// Inverse of escape_tsv. Returns false on a dangling or unknown escape.
bool unescape_tsv(std::string_view s, std::string& out);

}  // namespace polydawg
