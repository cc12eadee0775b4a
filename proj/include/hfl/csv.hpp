#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hfl::csv {

/// Shortest decimal form that parses back to the identical double.
std::string format(double x);

/// Parses a full field as a double; throws Error(Io) naming `context` on failure.
double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

std::vector<std::string> split(std::string_view line);

/// Reads all non-empty lines of a file (LF or CRLF). Throws Error(Io).
std::vector<std::string> read_lines(const std::string& path);

/// Writes `text` to `path`, or to stdout when path is "-". Throws Error(Io).
void write_text(const std::string& path, const std::string& text);

}  // namespace hfl::csv
