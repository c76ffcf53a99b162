#pragma once

// Interest-ratio based assimilation scoring.
//
// For a population p, the interest ratio of interest i is its audience
// divided by the population's total audience over the aligned universe.
// Interests whose destination ratio strictly exceeds the home ratio are
// "distinctly destination"; the top k% of those by IR_dest / IR_home are
// scored as IR_target / IR_dest and summarised by their median.

#include <span>
#include <string>
#include <vector>

#include "assim/core.hpp"

namespace assim {

struct InterestRatios {
    PopulationSpec population;
    std::vector<std::string> ids; // ascending
    std::vector<double> ratios;   // parallel to ids
};

/// ratio(i) = audience(i) / total. Throws ZeroTotalAudience.
InterestRatios interest_ratios(const AudienceTable& table);

struct DistinctInterest {
    std::string id;
    std::string name;
    double distinctiveness = 0.0; // IR_dest / IR_home, +inf when IR_home == 0
};

struct SelectionResult {
    std::vector<DistinctInterest> distinctly_dest; // ascending id
    std::vector<DistinctInterest> top_k;           // ratio desc, id asc
    double k_percent = 50.0;
    std::size_t universe_size = 0;
};

/// max(1, ceil(n * k / 100)).
std::size_t top_k_count(std::size_t n_distinct, double k_percent);

/// `names` optionally supplies display names parallel to dest_ir.ids.
SelectionResult select_distinct(const InterestRatios& dest_ir, const InterestRatios& home_ir,
                                double k_percent, std::span<const std::string> names = {});

struct InterestScore {
    std::string id;
    double score = 0.0;
};

struct ScoreOptions {
    bool cap_at_one = false; // clip per-interest scores to 1 before the median
};

/// Scores in top_k order. target_ir must cover the full aligned universe.
std::vector<InterestScore> per_interest_scores(const InterestRatios& target_ir,
                                               const InterestRatios& dest_ir,
                                               const SelectionResult& selection,
                                               ScoreOptions options = {});

/// Median; an even count averages the two middle values. Throws EmptyScores.
double aggregate_median(std::span<const double> values);
double aggregate_median(std::span<const InterestScore> scores);

struct ScoreReport {
    TripleSpec triple;
    SelectionResult selection;
    std::vector<InterestScore> per_interest;
    double median_score = 0.0;
    std::vector<std::string> dropped_ids;
};

ScoreReport score_triple(const AudienceTable& dest, const AudienceTable& target,
                         const AudienceTable& home, double k_percent, ScoreOptions options = {});

/// Same as score_triple on tables that already share one key set.
ScoreReport score_aligned(const AlignedTriple& aligned, double k_percent, ScoreOptions options = {});

} // namespace assim
