#include "assim/analysis.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>

#include "assim/random.hpp"
#include "assim/report.hpp"

namespace assim {

std::vector<std::size_t> parse_size_spec(const std::string& spec) {
    std::size_t parts[3] = {0, 0, 0};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const auto colon = spec.find(':', pos);
        if ((i < 2) != (colon != std::string::npos))
            throw Error(ErrorCode::InvalidSizeSpec, "size spec must be start:stop:step, got '" + spec + "'");
        const auto end = i < 2 ? colon : spec.size();
        const char* first = spec.data() + pos;
        const char* last = spec.data() + end;
        auto [p, ec] = std::from_chars(first, last, parts[i]);
        if (first == last || ec != std::errc{} || p != last)
            throw Error(ErrorCode::InvalidSizeSpec, "size spec must be start:stop:step, got '" + spec + "'");
        pos = end + 1;
    }
    const auto [start, stop, step] = parts;
    if (start == 0 || step == 0 || stop < start)
        throw Error(ErrorCode::InvalidSizeSpec, "size spec needs 0 < start <= stop and step > 0");
    std::vector<std::size_t> sizes;
    for (std::size_t s = start; s <= stop; s += step)
        sizes.push_back(s);
    return sizes;
}

std::vector<std::size_t> stability_sample(std::size_t universe, std::size_t size, int trial,
                                          std::uint64_t seed) {
    Rng rng(stream_seed(seed, size, static_cast<std::uint64_t>(trial)));
    return sample_without_replacement(universe, size, rng);
}

namespace {

struct Prepared {
    AlignedTriple aligned;
    std::size_t n_jobs = 0;
};

Prepared prepare(const AudienceTable& dest, const AudienceTable& target, const AudienceTable& home,
                 const StabilityConfig& config) {
    validate_k(config.k_percent);
    if (config.trials < 1)
        throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    if (config.sizes.empty())
        throw Error(ErrorCode::InvalidSizeSpec, "no subset sizes given");
    for (std::size_t i = 0; i < config.sizes.size(); ++i) {
        if (config.sizes[i] == 0 || (i > 0 && config.sizes[i] <= config.sizes[i - 1]))
            throw Error(ErrorCode::InvalidSizeSpec, "subset sizes must be positive and strictly increasing");
    }
    Prepared p{align_tables(validate_table(dest), validate_table(target), validate_table(home)), 0};
    const auto universe = p.aligned.dest.size();
    if (config.sizes.back() > universe)
        throw Error(ErrorCode::SizeExceedsUniverse,
                    "subset size " + std::to_string(config.sizes.back()) + " exceeds universe of " +
                        std::to_string(universe) + " interests");
    validate_triple({p.aligned.dest.population, p.aligned.target.population,
                     p.aligned.home.population, config.k_percent});
    p.n_jobs = config.sizes.size() * static_cast<std::size_t>(config.trials);
    return p;
}

std::optional<double> run_cell(const AlignedTriple& aligned, const StabilityConfig& config,
                               std::size_t job) {
    const auto size = config.sizes[job / static_cast<std::size_t>(config.trials)];
    const auto trial = static_cast<int>(job % static_cast<std::size_t>(config.trials));
    const auto universe = aligned.dest.size();

    std::vector<bool> keep(universe, false);
    for (auto idx : stability_sample(universe, size, trial, config.seed))
        keep[idx] = true;
    const AlignedTriple subset{restrict_table(aligned.dest, keep), restrict_table(aligned.target, keep),
                               restrict_table(aligned.home, keep), {}};
    try {
        return score_aligned(subset, config.k_percent).median_score;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoDistinctiveInterests || e.code() == ErrorCode::ZeroTotalAudience)
            return std::nullopt;
        throw;
    }
}

StabilitySeries summarize(const StabilityConfig& config, std::vector<std::optional<double>> cells) {
    StabilitySeries series;
    series.sizes = config.sizes;
    series.trials_per_size = config.trials;
    series.seed = config.seed;
    series.stability_floor = config.stability_floor;

    const auto trials = static_cast<std::size_t>(config.trials);
    std::vector<double> stable;
    for (std::size_t s = 0; s < config.sizes.size(); ++s) {
        auto& row = series.scores[config.sizes[s]];
        for (std::size_t t = 0; t < trials; ++t) {
            const auto& cell = cells[s * trials + t];
            row.push_back(cell);
            if (!cell)
                ++series.misses;
            else if (config.sizes[s] >= config.stability_floor)
                stable.push_back(*cell);
        }
    }

    if (stable.empty()) {
        series.mean_score = std::numeric_limits<double>::quiet_NaN();
        series.max_rel_change = series.avg_rel_change = std::numeric_limits<double>::quiet_NaN();
        return series;
    }
    double sum = 0.0;
    for (double v : stable)
        sum += v;
    series.mean_score = sum / static_cast<double>(stable.size());
    double max_rel = 0.0, sum_rel = 0.0;
    for (double v : stable) {
        const double rel = std::abs(v - series.mean_score) / series.mean_score;
        max_rel = std::max(max_rel, rel);
        sum_rel += rel;
    }
    series.max_rel_change = max_rel;
    series.avg_rel_change = sum_rel / static_cast<double>(stable.size());
    return series;
}

} // namespace

StabilitySeries subset_stability_serial(const AudienceTable& dest, const AudienceTable& target,
                                        const AudienceTable& home, const StabilityConfig& config) {
    const auto prepared = prepare(dest, target, home, config);
    std::vector<std::optional<double>> cells(prepared.n_jobs);
    for (std::size_t job = 0; job < prepared.n_jobs; ++job)
        cells[job] = run_cell(prepared.aligned, config, job);
    return summarize(config, std::move(cells));
}

StabilitySeries subset_stability(const AudienceTable& dest, const AudienceTable& target,
                                 const AudienceTable& home, const StabilityConfig& config) {
    const auto prepared = prepare(dest, target, home, config);
    const auto n_jobs = static_cast<std::int64_t>(prepared.n_jobs);
    std::vector<std::optional<double>> cells(prepared.n_jobs);
    std::vector<std::exception_ptr> errors(prepared.n_jobs);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t job = 0; job < n_jobs; ++job) {
        const auto j = static_cast<std::size_t>(job);
        try {
            cells[j] = run_cell(prepared.aligned, config, j);
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }

    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return summarize(config, std::move(cells));
}

void write_stability_csv(const StabilitySeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || std::filesystem::is_directory(path))
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << "size,trial,median_score\n";
    for (auto size : series.sizes) {
        const auto& row = series.scores.at(size);
        for (std::size_t t = 0; t < row.size(); ++t) {
            out << size << ',' << t << ',';
            if (row[t])
                out << format_double(*row[t]);
            out << '\n';
        }
    }
    if (!out)
        throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

} // namespace assim
