#pragma once

#include <filesystem>
#include <vector>

#include "assim/core.hpp"

namespace assim {

// Header of every audience file.
inline constexpr std::string_view kAudienceHeader = "interest_id,interest_name,audience";

/// Reads `interest_id,interest_name,audience` rows into a validated table.
/// Errors: IoError, ParseError (with line number), NegativeAudience,
/// DuplicateInterest, EmptyTable.
AudienceTable load_audience_csv(const std::filesystem::path& path, PopulationSpec population);

void write_audience_csv(const AudienceTable& table, const std::filesystem::path& path);

/// Reads an interest list (`interest_id,interest_name`, extra columns ignored).
std::vector<InterestId> load_interest_list(const std::filesystem::path& path);

} // namespace assim
