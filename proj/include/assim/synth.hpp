#pragma once

// Synthetic dest/home/target triples with a known answer. The target's
// interest shares are alpha * p_dest + (1 - alpha) * p_home, so each selected
// interest scores alpha + (1 - alpha) * p_home / p_dest exactly.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "assim/core.hpp"

namespace assim {

enum class ScaledPopulation { None, Dest, Home, Target };

struct SynthConfig {
    std::size_t n_interests = 100;
    double alpha = 0.5;
    Audience dest_total = 10'000'000;
    Audience home_total = 10'000'000;
    Audience target_total = 1'000'000;
    double activity_scale = 1.0;
    ScaledPopulation scaled = ScaledPopulation::None;
    double dirichlet_concentration = 2.0;
    double k_percent = 50.0;
    std::uint64_t seed = 0;
};

void validate_synth_config(const SynthConfig& config);

struct SynthTriple {
    AudienceTable dest;
    AudienceTable home;
    AudienceTable target;
    std::vector<double> p_dest;
    std::vector<double> p_home;
    double oracle_median = 0.0;
};

SynthTriple generate_triple(const SynthConfig& config);

/// Closed-form median score for exact shares.
double oracle_median(std::span<const double> p_dest, std::span<const double> p_home,
                     double alpha, double k_percent);

/// Writes dest.csv, home.csv, target.csv and ground_truth.json into `dir`.
void write_synth_outputs(const SynthTriple& triple, const SynthConfig& config,
                         const std::filesystem::path& dir);

/// Zero-padded interest id for index i, so id order matches index order.
std::string synth_interest_id(std::size_t i, std::size_t n);

} // namespace assim
