#include "assim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "assim/csv.hpp"

namespace assim {

namespace {

double parse_real(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc{} || p != last || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, where + "'" + text + "' is not a number");
    return v;
}

} // namespace

RegionSeries load_region_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path))
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    const auto rows = csv::read_all(in);
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"region", "value", "area_km2"})
        throw Error(ErrorCode::ParseError, path.string() + ": expected header region,value,area_km2");

    RegionSeries series;
    std::vector<double> areas;
    bool all_areas = true;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto where = path.string() + ":" + std::to_string(row.line) + ": ";
        if (row.fields.size() != 3 || row.fields[0].empty())
            throw Error(ErrorCode::ParseError, where + "malformed region row");
        if (std::find(series.regions.begin(), series.regions.end(), row.fields[0]) != series.regions.end())
            throw Error(ErrorCode::ParseError, where + "duplicate region '" + row.fields[0] + "'");
        series.regions.push_back(row.fields[0]);
        series.values.push_back(parse_real(row.fields[1], where));
        if (row.fields[2].empty())
            all_areas = false;
        else
            areas.push_back(parse_real(row.fields[2], where));
    }
    if (all_areas && !series.regions.empty())
        series.area_km2 = std::move(areas);
    return series;
}

RegionSeries normalize_by_area(const RegionSeries& series) {
    if (!series.area_km2 || series.area_km2->size() != series.values.size())
        throw Error(ErrorCode::MissingArea, "per-area normalization needs an area for every region");
    RegionSeries out{series.regions, {}, std::nullopt};
    out.values.reserve(series.values.size());
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double area = (*series.area_km2)[i];
        if (!(area > 0.0))
            throw Error(ErrorCode::NonPositiveArea, "region '" + series.regions[i] + "' has area " +
                                                        std::to_string(area));
        out.values.push_back(series.values[i] / area);
    }
    return out;
}

RegionSeries join_regions(const RegionSeries& a, const RegionSeries& b) {
    if (a.regions.size() != b.regions.size())
        throw Error(ErrorCode::RegionMismatch, "series cover " + std::to_string(a.regions.size()) +
                                                   " and " + std::to_string(b.regions.size()) + " regions");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < b.regions.size(); ++i)
        index[b.regions[i]] = i;

    RegionSeries out{a.regions, {}, std::nullopt};
    std::vector<double> areas;
    for (const auto& name : a.regions) {
        const auto it = index.find(name);
        if (it == index.end())
            throw Error(ErrorCode::RegionMismatch, "region '" + name + "' missing from second series");
        out.values.push_back(b.values[it->second]);
        if (b.area_km2)
            areas.push_back((*b.area_km2)[it->second]);
    }
    if (b.area_km2)
        out.area_km2 = std::move(areas);
    return out;
}

double pearson_r(const RegionSeries& a, const RegionSeries& b) {
    if (a.values.size() != b.values.size() || a.regions.size() != a.values.size() ||
        b.regions.size() != b.values.size())
        throw Error(ErrorCode::LengthMismatch, "series lengths differ");
    if (a.regions != b.regions)
        throw Error(ErrorCode::RegionMismatch, "series list different regions or orders");
    const auto n = a.values.size();
    if (n < 2)
        throw Error(ErrorCode::LengthMismatch, "correlation needs at least two regions");

    auto is_constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (is_constant(a.values) || is_constant(b.values))
        throw Error(ErrorCode::ConstantSeries, "correlation undefined for a constant series");

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.values[i];
        mean_b += b.values[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = a.values[i] - mean_a;
        const double dy = b.values[i] - mean_b;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace assim
