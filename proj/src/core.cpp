#include "assim/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace assim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeAudience: return "NegativeAudience";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::TotalMismatch: return "TotalMismatch";
    case ErrorCode::DuplicateInterest: return "DuplicateInterest";
    case ErrorCode::InvalidPopulation: return "InvalidPopulation";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ContractViolation: return "ContractViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ZeroTotalAudience: return "ZeroTotalAudience";
    case ErrorCode::NoDistinctiveInterests: return "NoDistinctiveInterests";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::SizeExceedsUniverse: return "SizeExceedsUniverse";
    case ErrorCode::InvalidSizeSpec: return "InvalidSizeSpec";
    case ErrorCode::MissingArea: return "MissingArea";
    case ErrorCode::NonPositiveArea: return "NonPositiveArea";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RegionMismatch: return "RegionMismatch";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::DegenerateDraw: return "DegenerateDraw";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    }
    return "Unknown";
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(ExpatStatus s) noexcept {
    switch (s) {
    case ExpatStatus::All: return "all";
    case ExpatStatus::ExpatsAll: return "expats_all";
    case ExpatStatus::NonExpats: return "non_expats";
    case ExpatStatus::ExpatsFrom: return "expats_from";
    }
    return "all";
}

std::string_view to_string(Gender g) noexcept {
    switch (g) {
    case Gender::All: return "all";
    case Gender::Men: return "men";
    case Gender::Women: return "women";
    }
    return "all";
}

std::string_view to_string(Education e) noexcept {
    switch (e) {
    case Education::All: return "all";
    case Education::UniversityGraduate: return "university_graduate";
    case Education::NotUniversity: return "not_university";
    }
    return "all";
}

ExpatStatus parse_expat_status(std::string_view s) {
    const auto v = lower(s);
    if (v == "all") return ExpatStatus::All;
    if (v == "expats_all") return ExpatStatus::ExpatsAll;
    if (v == "non_expats") return ExpatStatus::NonExpats;
    if (v == "expats_from") return ExpatStatus::ExpatsFrom;
    throw Error(ErrorCode::InvalidPopulation, "unknown expat status '" + std::string(s) + "'");
}

Gender parse_gender(std::string_view s) {
    const auto v = lower(s);
    if (v == "all") return Gender::All;
    if (v == "men") return Gender::Men;
    if (v == "women") return Gender::Women;
    throw Error(ErrorCode::InvalidPopulation, "unknown gender '" + std::string(s) + "'");
}

Education parse_education(std::string_view s) {
    const auto v = lower(s);
    if (v == "all") return Education::All;
    if (v == "university_graduate") return Education::UniversityGraduate;
    if (v == "not_university") return Education::NotUniversity;
    throw Error(ErrorCode::InvalidPopulation, "unknown education '" + std::string(s) + "'");
}

void validate_population(const PopulationSpec& pop) {
    if (pop.label.empty())
        throw Error(ErrorCode::InvalidPopulation, "population label is empty");
    if (pop.age_min < 13 || pop.age_min > pop.age_max || pop.age_max > 120)
        throw Error(ErrorCode::InvalidPopulation,
                    "age range " + std::to_string(pop.age_min) + "-" + std::to_string(pop.age_max) +
                        " outside 13..120 for '" + pop.label + "'");
    if (pop.expat_status == ExpatStatus::ExpatsFrom && pop.expats_from.empty())
        throw Error(ErrorCode::InvalidPopulation, "expats_from needs an origin country");
}

std::string fingerprint(const PopulationSpec& pop) {
    std::string status(to_string(pop.expat_status));
    if (pop.expat_status == ExpatStatus::ExpatsFrom)
        status += "(" + pop.expats_from + ")";
    std::string fp = pop.country + "|" + pop.language.value_or("") + "|" + status + "|" +
                     std::to_string(pop.age_min) + "-" + std::to_string(pop.age_max) + "|" +
                     std::string(to_string(pop.gender)) + "|" +
                     std::string(to_string(pop.education));
    return lower(fp);
}

AudienceTable validate_table(AudienceTable table) {
    if (table.entries.empty())
        throw Error(ErrorCode::EmptyTable, "audience table for '" + table.population.label + "' is empty");

    std::sort(table.entries.begin(), table.entries.end(),
              [](const AudienceEntry& a, const AudienceEntry& b) { return a.id < b.id; });

    Audience sum = 0;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        if (e.id.empty())
            throw Error(ErrorCode::ParseError, "empty interest id");
        if (i > 0 && table.entries[i - 1].id == e.id)
            throw Error(ErrorCode::DuplicateInterest, "interest id '" + e.id + "' appears twice");
        if (e.audience < 0)
            throw Error(ErrorCode::NegativeAudience,
                        "interest '" + e.id + "' has audience " + std::to_string(e.audience));
        sum += e.audience;
    }
    if (sum != table.total)
        throw Error(ErrorCode::TotalMismatch, "declared total " + std::to_string(table.total) +
                                                  " but entries sum to " + std::to_string(sum));
    return table;
}

AudienceTable make_table(PopulationSpec population, std::vector<AudienceEntry> entries) {
    AudienceTable t{std::move(population), std::move(entries), 0};
    for (const auto& e : t.entries)
        t.total += e.audience;
    return validate_table(std::move(t));
}

void validate_k(double k_percent) {
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        throw Error(ErrorCode::InvalidK, "k_percent must be in (0, 100]");
}

void validate_triple(const TripleSpec& triple) {
    validate_k(triple.k_percent);
    const std::set<std::string> labels{triple.dest.label, triple.target.label, triple.home.label};
    if (labels.size() != 3)
        throw Error(ErrorCode::InvalidTriple, "dest, target and home need distinct labels");
}

AudienceTable restrict_table(const AudienceTable& table, const std::vector<bool>& keep) {
    AudienceTable out{table.population, {}, 0};
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        if (!keep[i])
            continue;
        out.entries.push_back(table.entries[i]);
        out.total += table.entries[i].audience;
    }
    return out;
}

AlignedTriple align_tables(const AudienceTable& dest, const AudienceTable& target,
                           const AudienceTable& home) {
    std::set<std::string> all;
    auto ids_of = [&all](const AudienceTable& t) {
        std::set<std::string> s;
        for (const auto& e : t.entries) {
            s.insert(e.id);
            all.insert(e.id);
        }
        return s;
    };
    const auto d = ids_of(dest);
    const auto t = ids_of(target);
    const auto h = ids_of(home);

    std::set<std::string> shared;
    for (const auto& id : d)
        if (t.count(id) && h.count(id))
            shared.insert(id);
    if (shared.empty())
        throw Error(ErrorCode::EmptyIntersection, "dest, target and home share no interest");

    auto restrict_to_shared = [&shared](const AudienceTable& table) {
        std::vector<bool> keep(table.entries.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
            keep[i] = shared.count(table.entries[i].id) > 0;
        auto out = restrict_table(table, keep);
        std::sort(out.entries.begin(), out.entries.end(),
                  [](const AudienceEntry& a, const AudienceEntry& b) { return a.id < b.id; });
        return out;
    };

    AlignedTriple aligned{restrict_to_shared(dest), restrict_to_shared(target),
                          restrict_to_shared(home), {}};
    for (const auto& id : all)
        if (!shared.count(id))
            aligned.dropped_ids.push_back(id);
    return aligned;
}

} // namespace assim
