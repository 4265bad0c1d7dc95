#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rv::csv {

using Row = std::vector<std::string>;

/// RFC 4180 field quoting: fields containing ',', '"', CR or LF are quoted.
std::string format_row(const Row& row);

/// Parses a whole document. Quoted fields may contain separators and newlines.
/// Throws Error(parse_error) with the line number on an unterminated quote.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<Row>& rows);

/// Shortest round-trip decimal representation.
std::string format_number(double value);
/// Throws Error(parse_error).
double parse_number(std::string_view text);

}  // namespace rv::csv
