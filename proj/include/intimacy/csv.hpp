#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace intimacy::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// A leading UTF-8 byte-order mark is dropped.
std::vector<Row> parse(std::string_view content);
std::vector<Row> read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Fixed-point text with `digits` decimals.
std::string format_fixed(double value, int digits);

std::string read_text(const std::filesystem::path& path);

}  // namespace intimacy::csv
