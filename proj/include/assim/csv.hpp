#pragma once

// Minimal RFC-4180 reader/writer used by every file format in the project.

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace assim::csv {

struct Row {
    std::size_t line = 0; // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// Parses the whole stream. Quoted fields may contain commas, doubled quotes
/// and line breaks. CRLF and a leading UTF-8 BOM are accepted. Blank lines are
/// skipped. Throws ParseError on an unterminated quote or stray characters
/// after a closing quote.
std::vector<Row> read_all(std::istream& in);

std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace assim::csv
