#include "assim/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace assim {

InterestRatios interest_ratios(const AudienceTable& table) {
    if (table.total <= 0)
        throw Error(ErrorCode::ZeroTotalAudience,
                    "population '" + table.population.label + "' has zero total audience");
    InterestRatios ir{table.population, {}, {}};
    ir.ids.reserve(table.size());
    ir.ratios.reserve(table.size());
    const auto total = static_cast<double>(table.total);
    for (const auto& e : table.entries) {
        ir.ids.push_back(e.id);
        ir.ratios.push_back(static_cast<double>(e.audience) / total);
    }
    return ir;
}

std::size_t top_k_count(std::size_t n_distinct, double k_percent) {
    // the epsilon keeps exact products such as 10 * 30 / 100 from rounding up
    const double raw = static_cast<double>(n_distinct) * k_percent / 100.0;
    const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::clamp<std::size_t>(count, 1, std::max<std::size_t>(n_distinct, 1));
}

SelectionResult select_distinct(const InterestRatios& dest_ir, const InterestRatios& home_ir,
                                double k_percent, std::span<const std::string> names) {
    validate_k(k_percent);
    if (dest_ir.ids != home_ir.ids)
        throw Error(ErrorCode::InvalidTriple, "dest and home ratios cover different interests");

    SelectionResult sel;
    sel.k_percent = k_percent;
    sel.universe_size = dest_ir.ids.size();
    for (std::size_t i = 0; i < dest_ir.ids.size(); ++i) {
        const double d = dest_ir.ratios[i];
        const double h = home_ir.ratios[i];
        if (!(d > h))
            continue;
        const double ratio = h == 0.0 ? std::numeric_limits<double>::infinity() : d / h;
        sel.distinctly_dest.push_back(
            {dest_ir.ids[i], names.empty() ? dest_ir.ids[i] : names[i], ratio});
    }
    if (sel.distinctly_dest.empty())
        throw Error(ErrorCode::NoDistinctiveInterests,
                    "no interest is more popular in '" + dest_ir.population.label + "' than in '" +
                        home_ir.population.label + "'");

    sel.top_k = sel.distinctly_dest;
    std::sort(sel.top_k.begin(), sel.top_k.end(), [](const auto& a, const auto& b) {
        if (a.distinctiveness != b.distinctiveness)
            return a.distinctiveness > b.distinctiveness;
        return a.id < b.id;
    });
    sel.top_k.resize(top_k_count(sel.distinctly_dest.size(), k_percent));
    return sel;
}

std::vector<InterestScore> per_interest_scores(const InterestRatios& target_ir,
                                               const InterestRatios& dest_ir,
                                               const SelectionResult& selection,
                                               ScoreOptions options) {
    if (target_ir.ids != dest_ir.ids)
        throw Error(ErrorCode::InvalidTriple, "target and dest ratios cover different interests");
    if (selection.top_k.empty())
        throw Error(ErrorCode::EmptyScores, "selection is empty");

    std::vector<InterestScore> scores;
    scores.reserve(selection.top_k.size());
    for (const auto& pick : selection.top_k) {
        const auto it = std::lower_bound(dest_ir.ids.begin(), dest_ir.ids.end(), pick.id);
        if (it == dest_ir.ids.end() || *it != pick.id)
            throw Error(ErrorCode::InvalidTriple, "selected interest '" + pick.id + "' not in universe");
        const auto idx = static_cast<std::size_t>(it - dest_ir.ids.begin());
        double score = target_ir.ratios[idx] / dest_ir.ratios[idx];
        if (options.cap_at_one)
            score = std::min(score, 1.0);
        scores.push_back({pick.id, score});
    }
    return scores;
}

double aggregate_median(std::span<const double> values) {
    if (values.empty())
        throw Error(ErrorCode::EmptyScores, "median of an empty score set");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double aggregate_median(std::span<const InterestScore> scores) {
    std::vector<double> v;
    v.reserve(scores.size());
    for (const auto& s : scores)
        v.push_back(s.score);
    return aggregate_median(v);
}

ScoreReport score_aligned(const AlignedTriple& aligned, double k_percent, ScoreOptions options) {
    ScoreReport report;
    report.triple = {aligned.dest.population, aligned.target.population, aligned.home.population,
                     k_percent};
    validate_triple(report.triple);
    report.dropped_ids = aligned.dropped_ids;

    const auto dest_ir = interest_ratios(aligned.dest);
    const auto target_ir = interest_ratios(aligned.target);
    const auto home_ir = interest_ratios(aligned.home);

    std::vector<std::string> names;
    names.reserve(aligned.dest.size());
    for (const auto& e : aligned.dest.entries)
        names.push_back(e.name);

    report.selection = select_distinct(dest_ir, home_ir, k_percent, names);
    report.per_interest = per_interest_scores(target_ir, dest_ir, report.selection, options);
    report.median_score = aggregate_median(report.per_interest);
    return report;
}

ScoreReport score_triple(const AudienceTable& dest, const AudienceTable& target,
                         const AudienceTable& home, double k_percent, ScoreOptions options) {
    validate_k(k_percent);
    return score_aligned(align_tables(validate_table(dest), validate_table(target), validate_table(home)),
                         k_percent, options);
}

} // namespace assim
