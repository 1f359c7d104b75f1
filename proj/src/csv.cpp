#include "claimsbench/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "claimsbench/errors.hpp"

namespace claimsbench::csv {

namespace {

// Splits one logical CSV record starting at `pos`. Advances `pos` past the
// record's trailing newline.
std::vector<std::string> split_record(std::string_view text, size_t& pos, const std::string& origin,
                                      size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            ++pos;
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            fields.push_back(std::move(field));
            return fields;
        } else {
            field += c;
            ++pos;
        }
    }
    if (in_quotes) {
        fail(ErrorKind::MalformedRow,
             origin + ": line " + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

Table parse(std::string_view text, const std::string& origin) {
    Table table;
    table.origin = origin;
    size_t pos = 0;
    size_t line_no = 1;
    // skip a UTF-8 BOM if present
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
    if (pos >= text.size()) fail(ErrorKind::EmptyFile, origin + ": empty file");
    table.header = split_record(text, pos, origin, line_no);
    ++line_no;
    while (pos < text.size()) {
        auto fields = split_record(text, pos, origin, line_no);
        if (fields.size() == 1 && fields[0].empty()) {
            ++line_no;
            continue;  // blank line
        }
        if (fields.size() != table.header.size()) {
            fail(ErrorKind::MalformedRow, origin + ": line " + std::to_string(line_no) +
                                              ": expected " + std::to_string(table.header.size()) +
                                              " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        ++line_no;
    }
    return table;
}

Table read_file(const std::filesystem::path& path) {
    return parse(read_text_file(path), path.filename().string());
}

std::string format_field(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void append_line(std::string& out, std::span<const std::string> fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += format_field(fields[i]);
    }
    out += '\n';
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::FileUnreadable, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::FileUnreadable, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace claimsbench::csv
