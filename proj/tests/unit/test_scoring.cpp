#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "assim/report.hpp"
#include "assim/scoring.hpp"
#include "test_support.hpp"

using namespace assim;
using assim::testing::code_of;
using assim::testing::load_table1;
using assim::testing::pop;

namespace {

double ratio_of(const InterestRatios& ir, const std::string& id) {
    for (std::size_t i = 0; i < ir.ids.size(); ++i)
        if (ir.ids[i] == id)
            return ir.ratios[i];
    FAIL("missing id " << id);
    return 0.0;
}

std::vector<std::string> ids_of(const std::vector<DistinctInterest>& v) {
    std::vector<std::string> out;
    for (const auto& d : v)
        out.push_back(d.id);
    return out;
}

InterestRatios ratios(const std::string& label, std::vector<std::string> ids, std::vector<double> r) {
    return {pop(label), std::move(ids), std::move(r)};
}

// Hand arithmetic straight from the audience counts in the worked example.
struct Table1Oracle {
    static constexpr double dest_total = 790 + 6200 + 1200 + 1600 + 14;
    static constexpr double home_total = 260 + 1500 + 12000 + 6400 + 21000;
    static constexpr double target_total = 14 + 320 + 120 + 690 + 170;
    static double brewery_score() { return (14 / target_total) / (790 / dest_total); }
    static double berlin_score() { return (320 / target_total) / (6200 / dest_total); }
    static double median() { return (brewery_score() + berlin_score()) / 2; }
};

} // namespace

TEST_CASE("interest ratios of the worked example match the displayed values") {
    const auto t = load_table1();
    const auto dest = interest_ratios(t.dest);
    CHECK(std::abs(ratio_of(dest, "brewery") - 0.081) <= 0.001);
    CHECK(std::abs(ratio_of(dest, "berlin") - 0.632) <= 0.001);
    CHECK(std::abs(ratio_of(dest, "technology") - 0.122) <= 0.001);
    CHECK(std::abs(ratio_of(dest, "music") - 0.163) <= 0.001);
    CHECK(std::abs(ratio_of(dest, "god_in_islam") - 0.002) <= 0.001);

    const auto home = interest_ratios(t.home);
    CHECK(std::abs(ratio_of(home, "god_in_islam") - 0.510) <= 0.001);
    CHECK(std::abs(ratio_of(home, "technology") - 0.292) <= 0.001);
    CHECK(std::abs(ratio_of(home, "music") - 0.156) <= 0.001);
}

TEST_CASE("interest ratio edge cases") {
    const auto single = interest_ratios(make_table(pop("p"), {{"i1", "i1", 42}}));
    CHECK(single.ratios == std::vector<double>{1.0});
    const auto zero = make_table(pop("p"), {{"a", "a", 0}, {"b", "b", 0}});
    CHECK(code_of([&] { interest_ratios(zero); }) == ErrorCode::ZeroTotalAudience);
}

TEST_CASE("interest ratios sum to one") {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 100; ++i) {
        const auto ir = interest_ratios(assim::testing::random_table(gen, "p", 1 + gen() % 3000));
        const double sum = std::accumulate(ir.ratios.begin(), ir.ratios.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("selection on the worked example") {
    const auto t = load_table1();
    const auto sel = select_distinct(interest_ratios(t.dest), interest_ratios(t.home), 50.0);
    CHECK(ids_of(sel.distinctly_dest) == std::vector<std::string>{"berlin", "brewery", "music"});
    CHECK(ids_of(sel.top_k) == std::vector<std::string>{"berlin", "brewery"});
    CHECK(sel.universe_size == 5);
    // full precision distinctiveness: 6200/9804 / (1500/41160) and 790/9804 / (260/41160)
    CHECK(sel.top_k[0].distinctiveness == doctest::Approx((6200.0 / 9804) / (1500.0 / 41160)));
    CHECK(sel.top_k[1].distinctiveness == doctest::Approx((790.0 / 9804) / (260.0 / 41160)));
    CHECK(std::abs(sel.top_k[0].distinctiveness - 17.4) < 0.05);
    CHECK(std::abs(sel.top_k[1].distinctiveness - 12.8) < 0.05);
}

TEST_CASE("identical dest and home ratios select nothing") {
    const auto ir = ratios("d", {"a", "b"}, {0.4, 0.6});
    auto home = ir;
    home.population.label = "h";
    CHECK(code_of([&] { select_distinct(ir, home, 50.0); }) == ErrorCode::NoDistinctiveInterests);
}

TEST_CASE("equal distinctiveness ties go to the smaller id") {
    const auto dest = ratios("d", {"a", "b", "c", "z"}, {0.2, 0.2, 0.1, 0.5});
    const auto home = ratios("h", {"a", "b", "c", "z"}, {0.1, 0.1, 0.1, 0.7});
    const auto sel = select_distinct(dest, home, 50.0);
    CHECK(ids_of(sel.distinctly_dest) == std::vector<std::string>{"a", "b"});
    CHECK(ids_of(sel.top_k) == std::vector<std::string>{"a"});
}

TEST_CASE("zero home ratio ranks first with infinite distinctiveness") {
    const auto dest = ratios("d", {"a", "b", "c"}, {0.5, 0.3, 0.2});
    const auto home = ratios("h", {"a", "b", "c"}, {0.001, 0.0, 0.999});
    const auto sel = select_distinct(dest, home, 50.0);
    REQUIRE(sel.top_k.size() == 1);
    CHECK(sel.top_k[0].id == "b");
    CHECK(std::isinf(sel.top_k[0].distinctiveness));
}

TEST_CASE("top-k count") {
    CHECK(top_k_count(3, 50.0) == 2);
    CHECK(top_k_count(1, 10.0) == 1);
    CHECK(top_k_count(10, 30.0) == 3);
    CHECK(top_k_count(7, 100.0) == 7);
    CHECK(top_k_count(1453, 50.0) == 727);
    CHECK(top_k_count(200, 0.1) == 1);
}

TEST_CASE("per-interest scores on the worked example") {
    const auto t = load_table1();
    const auto dest = interest_ratios(t.dest);
    const auto sel = select_distinct(dest, interest_ratios(t.home), 50.0);
    const auto scores = per_interest_scores(interest_ratios(t.target), dest, sel);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].id == "berlin");
    CHECK(std::abs(scores[0].score - 0.39) <= 0.01);
    CHECK(std::abs(scores[1].score - 0.14) <= 0.01);
    CHECK(scores[0].score == doctest::Approx(Table1Oracle::berlin_score()).epsilon(1e-12));
    CHECK(scores[1].score == doctest::Approx(Table1Oracle::brewery_score()).epsilon(1e-12));
}

TEST_CASE("self-assimilation and zero target audience") {
    const auto t = load_table1();
    auto target = t.dest;
    target.population = pop("target");
    const auto report = score_triple(t.dest, target, t.home, 50.0);
    for (const auto& s : report.per_interest)
        CHECK(s.score == 1.0);
    CHECK(report.median_score == 1.0);

    auto zero = t.target;
    for (auto& e : zero.entries)
        if (e.id == "berlin") {
            zero.total -= e.audience;
            e.audience = 0;
        }
    const auto z = score_triple(t.dest, zero, t.home, 50.0);
    CHECK(z.per_interest[0].id == "berlin");
    CHECK(z.per_interest[0].score == 0.0);
}

TEST_CASE("median aggregation") {
    CHECK(aggregate_median(std::vector<double>{0.14, 0.39}) == doctest::Approx(0.265));
    CHECK(aggregate_median(std::vector<double>{0.5}) == 0.5);
    CHECK(aggregate_median(std::vector<double>{0.9, 0.1, 0.2}) == 0.2);
    CHECK(aggregate_median(std::vector<double>{4, 1, 3, 2}) == 2.5);
    CHECK(code_of([] { aggregate_median(std::vector<double>{}); }) == ErrorCode::EmptyScores);
}

TEST_CASE("score_triple end to end on the worked example") {
    const auto t = load_table1();
    const auto report = score_triple(t.dest, t.target, t.home, 50.0);
    CHECK(report.median_score == doctest::Approx(Table1Oracle::median()).epsilon(1e-12));
    CHECK(std::abs(report.median_score - 0.259) < 0.0005);
    CHECK(std::abs(report.median_score - 0.265) <= 0.01);
    CHECK(report.triple.k_percent == 50.0);
    CHECK(report.dropped_ids.empty());
}

TEST_CASE("optional cap clips scores at one") {
    const auto dest = make_table(pop("d"), {{"a", "a", 50}, {"b", "b", 30}, {"c", "c", 20}});
    const auto home = make_table(pop("h"), {{"a", "a", 10}, {"b", "b", 10}, {"c", "c", 80}});
    const auto target = make_table(pop("t"), {{"a", "a", 90}, {"b", "b", 5}, {"c", "c", 5}});
    const auto raw = score_triple(dest, target, home, 100.0);
    const auto capped = score_triple(dest, target, home, 100.0, {true});
    CHECK(raw.per_interest[0].score == doctest::Approx(1.8));
    CHECK(capped.per_interest[0].score == 1.0);
    CHECK(raw.median_score == doctest::Approx((1.8 + 5.0 / 30) / 2));
    CHECK(capped.median_score == doctest::Approx((1.0 + 5.0 / 30) / 2));
}

TEST_CASE("scaling any one population leaves the serialized report unchanged") {
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<Audience> factor(1, 1'000'000);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + gen() % 200;
        const auto d = assim::testing::random_table(gen, "dest", n);
        const auto t = assim::testing::random_table(gen, "target", n);
        const auto h = assim::testing::random_table(gen, "home", n);
        ScoreReport base;
        try {
            base = score_triple(d, t, h, 50.0);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoDistinctiveInterests);
            continue;
        }
        const auto c = factor(gen);
        for (int which = 0; which < 3; ++which) {
            auto tables = std::array{d, t, h};
            for (auto& e : tables[which].entries)
                e.audience *= c;
            tables[which].total *= c;
            const auto scaled = score_triple(tables[0], tables[1], tables[2], 50.0);
            CHECK(dump_report(scaled) == dump_report(base));
        }
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("mixture monotonicity") {
    // target shares = a * dest + (1 - a) * home, built exactly in integers:
    // counts scaled by 4 so a in {0, 1/4, ..., 1} stays integral.
    const std::vector<Audience> dest{50, 30, 15, 5}, home{5, 20, 25, 50};
    auto make = [](const std::string& label, const std::vector<Audience>& c) {
        std::vector<AudienceEntry> e;
        for (std::size_t i = 0; i < c.size(); ++i)
            e.push_back({"i" + std::to_string(i), "", c[i]});
        return make_table(pop(label), std::move(e));
    };
    double previous = -1.0;
    for (int q = 0; q <= 4; ++q) {
        std::vector<Audience> target;
        for (std::size_t i = 0; i < dest.size(); ++i)
            target.push_back(q * dest[i] + (4 - q) * home[i]);
        const auto report = score_triple(make("d", dest), make("t", target), make("h", home), 100.0);
        const double alpha = q / 4.0;
        for (const auto& s : report.per_interest) {
            const auto i = static_cast<std::size_t>(std::stoi(s.id.substr(1)));
            CHECK(s.score == doctest::Approx(alpha + (1 - alpha) * double(home[i]) / double(dest[i])));
        }
        CHECK(report.median_score >= previous);
        previous = report.median_score;
    }
    CHECK(previous == 1.0);
}

TEST_CASE("score report is deterministic") {
    const auto t = load_table1();
    CHECK(dump_report(score_triple(t.dest, t.target, t.home, 50.0)) ==
          dump_report(score_triple(t.dest, t.target, t.home, 50.0)));
}
