#pragma once

// Domain types shared by every stage of the pipeline: population
// descriptions, per-interest audience tables and the dest/target/home triple.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "assim/error.hpp"

namespace assim {

using Audience = std::int64_t;

enum class ExpatStatus { All, ExpatsAll, NonExpats, ExpatsFrom };
enum class Gender { All, Men, Women };
enum class Education { All, UniversityGraduate, NotUniversity };

struct InterestId {
    std::string id;
    std::string name;

    friend bool operator==(const InterestId&, const InterestId&) = default;
};

struct PopulationSpec {
    std::string label;
    std::string country;                 // ISO-3166 code or a region-set name
    std::optional<std::string> language; // language code, if targeted
    ExpatStatus expat_status = ExpatStatus::All;
    std::string expats_from;             // only meaningful for ExpatsFrom
    int age_min = 18;
    int age_max = 65;
    Gender gender = Gender::All;
    Education education = Education::All;

    friend bool operator==(const PopulationSpec&, const PopulationSpec&) = default;
};

/// Throws InvalidPopulation when the label is empty or the age range falls
/// outside 13 <= age_min <= age_max <= 120.
void validate_population(const PopulationSpec& pop);

/// Canonical cache/report key:
/// `country|language|expat_status|age_min-age_max|gender|education`, lowercase.
std::string fingerprint(const PopulationSpec& pop);

std::string_view to_string(ExpatStatus s) noexcept;
std::string_view to_string(Gender g) noexcept;
std::string_view to_string(Education e) noexcept;
ExpatStatus parse_expat_status(std::string_view s);
Gender parse_gender(std::string_view s);
Education parse_education(std::string_view s);

struct AudienceEntry {
    std::string id;
    std::string name;
    Audience audience = 0;

    friend bool operator==(const AudienceEntry&, const AudienceEntry&) = default;
};

// Audience sizes of one population over a set of interests. A validated
// table has unique ids in ascending order, non-negative counts and a total
// equal to the exact integer sum of the counts.
struct AudienceTable {
    PopulationSpec population;
    std::vector<AudienceEntry> entries;
    Audience total = 0;

    std::size_t size() const noexcept { return entries.size(); }

    friend bool operator==(const AudienceTable&, const AudienceTable&) = default;
};

/// Checks every table invariant and returns the table with entries sorted by
/// interest id. The stored total must already match the sum of the entries.
AudienceTable validate_table(AudienceTable table);

/// Builds a validated table from entries, computing the total.
AudienceTable make_table(PopulationSpec population, std::vector<AudienceEntry> entries);

struct TripleSpec {
    PopulationSpec dest;
    PopulationSpec target;
    PopulationSpec home;
    double k_percent = 50.0;
};

/// InvalidTriple on duplicate labels, InvalidK when k is outside (0, 100].
void validate_triple(const TripleSpec& triple);
void validate_k(double k_percent);

struct AlignedTriple {
    AudienceTable dest;
    AudienceTable target;
    AudienceTable home;
    std::vector<std::string> dropped_ids; // ascending, union of non-shared ids
};

/// Restricts the three tables to their shared interest ids and recomputes the
/// totals over that universe. Throws EmptyIntersection if nothing is shared.
AlignedTriple align_tables(const AudienceTable& dest, const AudienceTable& target,
                           const AudienceTable& home);

/// Keeps only the entries whose position in the table is flagged in `keep`.
AudienceTable restrict_table(const AudienceTable& table, const std::vector<bool>& keep);

} // namespace assim
