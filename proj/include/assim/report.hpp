#pragma once

// JSON encodings for reports and configuration objects.

#include <json.hpp>

#include "assim/core.hpp"
#include "assim/scoring.hpp"

namespace assim {

nlohmann::json to_json(const PopulationSpec& pop);
PopulationSpec population_from_json(const nlohmann::json& j);

/// {triple, k_percent, universe_size, distinct_count, selected, scores, median_score}
/// An infinite distinctiveness is written as null.
nlohmann::json to_json(const ScoreReport& report);

/// Serialized form used for byte-level comparisons and file output.
std::string dump_report(const ScoreReport& report);

/// Empty when `j` has the ScoreReport shape, otherwise one message per problem.
std::vector<std::string> check_report_schema(const nlohmann::json& j);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

} // namespace assim
