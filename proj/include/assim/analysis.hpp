#pragma once

// Robustness of the median score to the size of the interest universe, and
// per-region correlation used to validate a population proxy against an
// external reference.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "assim/core.hpp"
#include "assim/scoring.hpp"

namespace assim {

struct StabilityConfig {
    double k_percent = 50.0;
    std::vector<std::size_t> sizes; // strictly increasing
    int trials = 1;
    std::uint64_t seed = 0;
    std::size_t stability_floor = 500;
};

struct StabilitySeries {
    std::vector<std::size_t> sizes;
    int trials_per_size = 1;
    std::uint64_t seed = 0;
    std::size_t stability_floor = 500;
    // size -> one entry per trial; nullopt marks a trial whose subset had no
    // distinctly-destination interest
    std::map<std::size_t, std::vector<std::optional<double>>> scores;
    double mean_score = 0.0;      // baseline over sizes >= stability_floor
    double max_rel_change = 0.0;  // NaN when no sample qualifies
    double avg_rel_change = 0.0;
    std::size_t misses = 0;
};

/// Parses `start:stop:step` (stop inclusive). Throws InvalidSizeSpec.
std::vector<std::size_t> parse_size_spec(const std::string& spec);

/// Interest indices of the aligned universe drawn for one (size, trial) cell.
std::vector<std::size_t> stability_sample(std::size_t universe, std::size_t size, int trial,
                                          std::uint64_t seed);

/// Trials run in parallel with OpenMP; output does not depend on scheduling.
StabilitySeries subset_stability(const AudienceTable& dest, const AudienceTable& target,
                                 const AudienceTable& home, const StabilityConfig& config);

/// Single-threaded reference with the same output.
StabilitySeries subset_stability_serial(const AudienceTable& dest, const AudienceTable& target,
                                        const AudienceTable& home, const StabilityConfig& config);

/// `size,trial,median_score`; a miss leaves median_score empty.
void write_stability_csv(const StabilitySeries& series, const std::filesystem::path& path);

struct RegionSeries {
    std::vector<std::string> regions;
    std::vector<double> values;
    std::optional<std::vector<double>> area_km2;
};

/// `region,value,area_km2`; area may be empty. Areas are kept only when
/// every row has one.
RegionSeries load_region_csv(const std::filesystem::path& path);

/// value / area. Throws MissingArea, NonPositiveArea.
RegionSeries normalize_by_area(const RegionSeries& series);

/// Reorders `b` to follow `a`'s region order. Throws RegionMismatch unless
/// both name the same regions.
RegionSeries join_regions(const RegionSeries& a, const RegionSeries& b);

/// Sample Pearson correlation of two series over identical regions.
double pearson_r(const RegionSeries& a, const RegionSeries& b);

} // namespace assim
