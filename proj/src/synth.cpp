#include "assim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "assim/ingestion.hpp"
#include "assim/random.hpp"

namespace assim {

void validate_synth_config(const SynthConfig& c) {
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0))
        throw Error(ErrorCode::InvalidAlpha, "alpha must be in [0, 1]");
    if (c.n_interests < 2)
        throw Error(ErrorCode::InvalidConfig, "need at least 2 interests");
    const auto n = static_cast<Audience>(c.n_interests);
    if (c.dest_total < n || c.home_total < n || c.target_total < n)
        throw Error(ErrorCode::InvalidConfig, "population totals must be >= the number of interests");
    if (!(c.activity_scale > 0.0) || !std::isfinite(c.activity_scale))
        throw Error(ErrorCode::InvalidConfig, "activity_scale must be positive");
    if (!(c.dirichlet_concentration > 0.0) || !std::isfinite(c.dirichlet_concentration))
        throw Error(ErrorCode::InvalidConfig, "dirichlet_concentration must be positive");
    validate_k(c.k_percent);
}

std::string synth_interest_id(std::size_t i, std::size_t n) {
    const auto width = std::to_string(n > 0 ? n - 1 : 0).size();
    auto digits = std::to_string(i);
    return "i" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

namespace {

// Largest-share interests absorb the rounding residual so the counts sum to
// `total` exactly.
std::vector<Audience> counts_from_shares(Audience total, const std::vector<double>& shares) {
    std::vector<Audience> counts(shares.size());
    Audience sum = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        counts[i] = std::llround(static_cast<double>(total) * shares[i]);
        sum += counts[i];
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a] > shares[b]; });
    Audience residual = total - sum;
    for (auto idx : order) {
        if (residual == 0)
            break;
        const auto adjusted = std::max<Audience>(0, counts[idx] + residual);
        residual -= adjusted - counts[idx];
        counts[idx] = adjusted;
    }
    return counts;
}

AudienceTable build_table(PopulationSpec pop, const std::vector<Audience>& counts, double scale) {
    const auto n = counts.size();
    std::vector<AudienceEntry> entries;
    entries.reserve(n);
    const bool integral = scale == std::floor(scale);
    for (std::size_t i = 0; i < n; ++i) {
        Audience c = counts[i];
        if (scale != 1.0)
            c = integral ? c * static_cast<Audience>(scale)
                         : std::llround(static_cast<double>(c) * scale);
        entries.push_back({synth_interest_id(i, n), "Interest " + std::to_string(i), c});
    }
    return make_table(std::move(pop), std::move(entries));
}

PopulationSpec synth_population(std::string label, std::string country, ExpatStatus status) {
    PopulationSpec p;
    p.label = std::move(label);
    p.country = std::move(country);
    p.expat_status = status;
    return p;
}

} // namespace

SynthTriple generate_triple(const SynthConfig& config) {
    validate_synth_config(config);

    SynthTriple out;
    bool drawn = false;
    for (std::uint64_t attempt = 0; attempt < 10 && !drawn; ++attempt) {
        Rng dest_rng(stream_seed(config.seed, attempt, 0));
        Rng home_rng(stream_seed(config.seed, attempt, 1));
        out.p_dest = dirichlet(config.n_interests, config.dirichlet_concentration, dest_rng);
        out.p_home = dirichlet(config.n_interests, config.dirichlet_concentration, home_rng);
        drawn = out.p_dest != out.p_home;
    }
    if (!drawn)
        throw Error(ErrorCode::DegenerateDraw, "dest and home shares coincided on every attempt");

    std::vector<double> p_target(config.n_interests);
    for (std::size_t i = 0; i < p_target.size(); ++i)
        p_target[i] = config.alpha * out.p_dest[i] + (1.0 - config.alpha) * out.p_home[i];

    auto scale_for = [&](ScaledPopulation who) {
        return config.scaled == who ? config.activity_scale : 1.0;
    };
    out.dest = build_table(synth_population("dest", "de", ExpatStatus::NonExpats),
                           counts_from_shares(config.dest_total, out.p_dest),
                           scale_for(ScaledPopulation::Dest));
    out.home = build_table(synth_population("home", "home", ExpatStatus::NonExpats),
                           counts_from_shares(config.home_total, out.p_home),
                           scale_for(ScaledPopulation::Home));
    out.target = build_table(synth_population("target", "de", ExpatStatus::ExpatsAll),
                             counts_from_shares(config.target_total, p_target),
                             scale_for(ScaledPopulation::Target));
    out.oracle_median = oracle_median(out.p_dest, out.p_home, config.alpha, config.k_percent);
    return out;
}

double oracle_median(std::span<const double> p_dest, std::span<const double> p_home, double alpha,
                     double k_percent) {
    if (p_dest.size() != p_home.size() || p_dest.empty())
        throw Error(ErrorCode::LengthMismatch, "share vectors differ in length");
    validate_k(k_percent);

    struct Pick {
        std::size_t index;
        double ratio;
    };
    std::vector<Pick> picks;
    for (std::size_t i = 0; i < p_dest.size(); ++i) {
        if (p_dest[i] > p_home[i])
            picks.push_back({i, p_home[i] > 0.0 ? p_dest[i] / p_home[i]
                                                : std::numeric_limits<double>::infinity()});
    }
    if (picks.empty())
        throw Error(ErrorCode::NoDistinctiveInterests, "no share is larger in dest than in home");

    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
        return a.ratio > b.ratio || (a.ratio == b.ratio && a.index < b.index);
    });
    const double wanted = std::ceil(static_cast<double>(picks.size()) * k_percent / 100.0 - 1e-9);
    const auto keep = static_cast<std::size_t>(std::max(1.0, wanted));
    picks.resize(std::min(keep, picks.size()));

    std::vector<double> scores;
    for (const auto& p : picks)
        scores.push_back(alpha + (1.0 - alpha) * p_home[p.index] / p_dest[p.index]);
    const auto mid = scores.size() / 2;
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(mid), scores.end());
    const double upper = scores[mid];
    if (scores.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

void write_synth_outputs(const SynthTriple& triple, const SynthConfig& config,
                         const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    write_audience_csv(triple.dest, dir / "dest.csv");
    write_audience_csv(triple.home, dir / "home.csv");
    write_audience_csv(triple.target, dir / "target.csv");

    const nlohmann::json truth{{"alpha", config.alpha},
                               {"oracle_median", triple.oracle_median},
                               {"seed", config.seed},
                               {"k_percent", config.k_percent},
                               {"n_interests", config.n_interests},
                               {"rng", kRngAlgorithm}};
    std::ofstream out(dir / "ground_truth.json", std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write ground_truth.json in '" + dir.string() + "'");
    out << truth.dump(2) << '\n';
}

} // namespace assim
