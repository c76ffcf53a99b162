#include "assim/csv.hpp"

#include <iterator>

#include "assim/error.hpp"

namespace assim::csv {

std::vector<Row> read_all(std::istream& in) {
    std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (data.rfind("\xEF\xBB\xBF", 0) == 0)
        data.erase(0, 3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    std::size_t line = 1;
    row.line = 1;
    bool in_quotes = false;
    bool after_quote = false; // a quoted field just closed
    bool row_has_content = false;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
    };
    auto end_row = [&] {
        end_field();
        // a line holding nothing at all is skipped
        if (row_has_content)
            rows.push_back(std::move(row));
        row = Row{};
        row_has_content = false;
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n')
                    ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            row_has_content = true;
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n')
                ++i;
            end_row();
            ++line;
            row.line = line;
        } else if (c == '"' && field.empty() && !after_quote) {
            in_quotes = true;
            row_has_content = true;
        } else if (after_quote) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line) + ": unexpected character after closing quote");
        } else {
            row_has_content = true;
            field.push_back(c);
        }
    }
    if (in_quotes)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": unterminated quoted field");
    if (row_has_content || !field.empty())
        end_row();
    return rows;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

} // namespace assim::csv
