#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace claimsbench::csv {

struct Table {
    std::string origin;  // file name or label, used in error messages
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Parses comma-delimited text with a header row. Fields may be double-quoted
// with "" escaping. Throws Error{EmptyFile} when there is no header row and
// Error{MalformedRow} on ragged rows or unterminated quotes.
Table parse(std::string_view text, const std::string& origin);

Table read_file(const std::filesystem::path& path);

// Quotes the field only when it contains a comma, quote or newline.
std::string format_field(std::string_view field);

void append_line(std::string& out, std::span<const std::string> fields);

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double value);

// Fixed-point display with half-up rounding applied beforehand by the caller.
std::string format_fixed(double value, int decimals);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace claimsbench::csv
