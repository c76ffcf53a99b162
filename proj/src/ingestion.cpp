#include "assim/ingestion.hpp"

#include <charconv>
#include <fstream>

#include "assim/csv.hpp"

namespace assim {

namespace {

std::vector<csv::Row> read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path))
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return csv::read_all(in);
}

std::string at_line(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line) + ": ";
}

Audience parse_audience(std::string_view text, const std::string& where) {
    if (!text.empty() && text.front() == '-') {
        Audience v = 0;
        auto [p, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), v);
        if (ec == std::errc{} && p == text.data() + text.size())
            throw Error(ErrorCode::NegativeAudience, where + "negative audience " + std::string(text));
    }
    Audience v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || p != text.data() + text.size())
        throw Error(ErrorCode::ParseError, where + "audience '" + std::string(text) +
                                               "' is not a non-negative base-10 integer");
    return v;
}

} // namespace

AudienceTable load_audience_csv(const std::filesystem::path& path, PopulationSpec population) {
    const auto rows = read_csv_file(path);
    if (rows.empty())
        throw Error(ErrorCode::ParseError, path.string() + ": missing header");
    const auto& header = rows.front();
    if (header.fields != std::vector<std::string>{"interest_id", "interest_name", "audience"})
        throw Error(ErrorCode::ParseError, at_line(path, header.line) + "expected header " +
                                               std::string(kAudienceHeader));
    if (rows.size() == 1)
        throw Error(ErrorCode::EmptyTable, path.string() + ": no audience rows");

    std::vector<AudienceEntry> entries;
    entries.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto where = at_line(path, row.line);
        if (row.fields.size() != 3)
            throw Error(ErrorCode::ParseError, where + "expected 3 columns, got " +
                                                   std::to_string(row.fields.size()));
        if (row.fields[0].empty())
            throw Error(ErrorCode::ParseError, where + "empty interest_id");
        entries.push_back({row.fields[0], row.fields[1], parse_audience(row.fields[2], where)});
    }
    return make_table(std::move(population), std::move(entries));
}

void write_audience_csv(const AudienceTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || std::filesystem::is_directory(path))
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << kAudienceHeader << '\n';
    for (const auto& e : table.entries)
        csv::write_row(out, {e.id, e.name, std::to_string(e.audience)});
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

std::vector<InterestId> load_interest_list(const std::filesystem::path& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty() || rows.front().fields.size() < 2 || rows.front().fields[0] != "interest_id" ||
        rows.front().fields[1] != "interest_name")
        throw Error(ErrorCode::ParseError, path.string() + ": expected header interest_id,interest_name");
    std::vector<InterestId> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() < 2 || row.fields[0].empty())
            throw Error(ErrorCode::ParseError, at_line(path, row.line) + "malformed interest row");
        out.push_back({row.fields[0], row.fields[1]});
    }
    if (out.empty())
        throw Error(ErrorCode::EmptyTable, path.string() + ": no interests");
    return out;
}

} // namespace assim
