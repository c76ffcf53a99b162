#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "assim/analysis.hpp"
#include "assim/synth.hpp"
#include "test_support.hpp"

using namespace assim;
using assim::testing::code_of;
using assim::testing::fixture;
using assim::testing::TempDir;

namespace {

RegionSeries series(std::vector<double> values) {
    RegionSeries s;
    for (std::size_t i = 0; i < values.size(); ++i)
        s.regions.push_back("r" + std::to_string(i));
    s.values = std::move(values);
    return s;
}

// Covariance-formula oracle, written out independently of pearson_r.
double covariance_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

SynthTriple small_synth(std::uint64_t seed, std::size_t n = 300) {
    SynthConfig c;
    c.n_interests = n;
    c.alpha = 0.6;
    c.seed = seed;
    return generate_triple(c);
}

} // namespace

TEST_CASE("size spec parsing") {
    const auto sizes = parse_size_spec("100:2900:100");
    CHECK(sizes.size() == 29);
    CHECK(sizes.front() == 100);
    CHECK(sizes.back() == 2900);
    CHECK(parse_size_spec("5:5:1") == std::vector<std::size_t>{5});
    CHECK(parse_size_spec("10:25:10") == std::vector<std::size_t>{10, 20});
    for (const char* bad : {"", "100", "100:200", "a:b:c", "0:10:1", "10:5:1", "1:10:0", "1:10:2:3", "-1:10:1"})
        CHECK(code_of([&] { parse_size_spec(bad); }) == ErrorCode::InvalidSizeSpec);
}

TEST_CASE("stability samples are reproducible and distinct") {
    const auto a = stability_sample(1000, 100, 3, 7);
    CHECK(a == stability_sample(1000, 100, 3, 7));
    CHECK(a != stability_sample(1000, 100, 4, 7));
    CHECK(a != stability_sample(1000, 100, 3, 8));
    CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 100);
    for (auto i : a)
        CHECK(i < 1000);
}

TEST_CASE("full-universe subset reproduces score_triple exactly") {
    const auto s = small_synth(3);
    const auto full = score_triple(s.dest, s.target, s.home, 50.0);
    StabilityConfig cfg;
    cfg.sizes = {s.dest.size()};
    cfg.trials = 1;
    cfg.seed = 99;
    cfg.stability_floor = 1;
    const auto series = subset_stability(s.dest, s.target, s.home, cfg);
    REQUIRE(series.scores.at(s.dest.size()).size() == 1);
    CHECK(*series.scores.at(s.dest.size())[0] == full.median_score);
    CHECK(series.max_rel_change == 0.0);
}

TEST_CASE("same seed gives identical series and parallel matches serial") {
    const auto s = small_synth(4);
    StabilityConfig cfg;
    cfg.sizes = parse_size_spec("20:300:20");
    cfg.trials = 3;
    cfg.seed = 7;
    cfg.stability_floor = 100;
    const auto a = subset_stability(s.dest, s.target, s.home, cfg);
    const auto b = subset_stability(s.dest, s.target, s.home, cfg);
    const auto serial = subset_stability_serial(s.dest, s.target, s.home, cfg);
    CHECK(a.scores == b.scores);
    CHECK(a.scores == serial.scores);
    CHECK(a.max_rel_change == serial.max_rel_change);
    CHECK(a.avg_rel_change == serial.avg_rel_change);
    for (const auto& [size, row] : a.scores)
        CHECK(row.size() == 3);
    CHECK(a.avg_rel_change <= a.max_rel_change);

    cfg.seed = 8;
    CHECK(subset_stability(s.dest, s.target, s.home, cfg).scores != a.scores);
}

TEST_CASE("stability errors and misses") {
    const auto s = small_synth(5, 50);
    StabilityConfig cfg;
    cfg.sizes = {10, 60};
    CHECK(code_of([&] { subset_stability(s.dest, s.target, s.home, cfg); }) == ErrorCode::SizeExceedsUniverse);
    cfg.sizes = {20, 10};
    CHECK(code_of([&] { subset_stability(s.dest, s.target, s.home, cfg); }) == ErrorCode::InvalidSizeSpec);
    cfg.sizes = {10};
    cfg.trials = 0;
    CHECK(code_of([&] { subset_stability(s.dest, s.target, s.home, cfg); }) == ErrorCode::InvalidConfig);

    // a subset made only of interests where dest == home has no distinctive interest
    auto dest = make_table(assim::testing::pop("d"), {{"a", "", 10}, {"b", "", 10}, {"c", "", 30}, {"d", "", 50}});
    auto home = make_table(assim::testing::pop("h"), {{"a", "", 10}, {"b", "", 10}, {"c", "", 50}, {"d", "", 30}});
    auto target = make_table(assim::testing::pop("t"), {{"a", "", 5}, {"b", "", 5}, {"c", "", 5}, {"d", "", 5}});
    cfg.sizes = {1, 4};
    cfg.trials = 20;
    cfg.seed = 1;
    cfg.stability_floor = 4;
    const auto series = subset_stability(dest, target, home, cfg);
    CHECK(series.misses > 0);
    std::size_t missing = 0;
    for (const auto& v : series.scores.at(1))
        missing += !v.has_value();
    CHECK(missing == series.misses);
    for (const auto& v : series.scores.at(4))
        CHECK(v.has_value());
    CHECK(series.max_rel_change == 0.0);
}

TEST_CASE("stability CSV layout") {
    const auto s = small_synth(6, 100);
    StabilityConfig cfg;
    cfg.sizes = {50, 100};
    cfg.trials = 2;
    cfg.seed = 1;
    const auto series = subset_stability(s.dest, s.target, s.home, cfg);
    TempDir dir;
    write_stability_csv(series, dir / "s.csv");
    std::ifstream in(dir / "s.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "size,trial,median_score");
    CHECK(lines[1].rfind("50,0,", 0) == 0);
    CHECK(lines[4].rfind("100,1,", 0) == 0);
}

TEST_CASE("pearson on affine and hand fixtures") {
    const auto a = series({1.5, -2.0, 7.25, 3.0, 0.5});
    auto b = a;
    for (auto& v : b.values)
        v = 3 * v + 7;
    CHECK(std::abs(pearson_r(a, b) - 1.0) <= 1e-12);
    for (auto& v : b.values)
        v = -v;
    auto neg = a;
    for (auto& v : neg.values)
        v = -v;
    CHECK(std::abs(pearson_r(a, neg) + 1.0) <= 1e-12);

    const auto x = series({1, 2, 3, 4});
    const auto y = series({2, 1, 4, 3});
    CHECK(covariance_oracle(x.values, y.values) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(std::abs(pearson_r(x, y) - 0.6) <= 1e-12);
}

TEST_CASE("pearson is symmetric and invariant to positive affine maps") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-1e3, 1e3);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + gen() % 30;
        std::vector<double> xs(n), ys(n);
        for (std::size_t k = 0; k < n; ++k) {
            xs[k] = noise(gen);
            ys[k] = 0.7 * xs[k] + noise(gen);
        }
        const auto a = series(xs), b = series(ys);
        const double r = pearson_r(a, b);
        CHECK(std::abs(r - pearson_r(b, a)) <= 1e-12);
        CHECK(std::abs(r - covariance_oracle(xs, ys)) <= 1e-9);
        auto ta = a;
        const double s = scale(gen), c = shift(gen);
        for (auto& v : ta.values)
            v = s * v + c;
        CHECK(std::abs(r - pearson_r(ta, b)) <= 1e-9);
    }
}

TEST_CASE("pearson preconditions") {
    CHECK(code_of([] { pearson_r(series({1, 2, 3}), series({1, 2})); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { pearson_r(series({1}), series({2})); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { pearson_r(series({1, 1, 1}), series({1, 2, 3})); }) == ErrorCode::ConstantSeries);
    auto b = series({1, 2, 3});
    b.regions[0] = "elsewhere";
    CHECK(code_of([&] { pearson_r(series({3, 1, 2}), b); }) == ErrorCode::RegionMismatch);
}

TEST_CASE("area normalization") {
    auto s = series({100, 50});
    s.area_km2 = std::vector<double>{10, 5};
    CHECK(normalize_by_area(s).values == std::vector<double>{10, 10});
    CHECK_FALSE(normalize_by_area(s).area_km2.has_value());

    auto unit = series({3, 4, 5});
    unit.area_km2 = std::vector<double>{1, 1, 1};
    CHECK(normalize_by_area(unit).values == unit.values);

    auto zero = series({3, 4});
    zero.area_km2 = std::vector<double>{1, 0};
    CHECK(code_of([&] { normalize_by_area(zero); }) == ErrorCode::NonPositiveArea);
    CHECK(code_of([] { normalize_by_area(series({1, 2})); }) == ErrorCode::MissingArea);
}

TEST_CASE("region files join by name") {
    const auto a = load_region_csv(fixture("regions/counts_a.csv"));
    const auto b = load_region_csv(fixture("regions/counts_b_shuffled.csv"));
    REQUIRE(a.area_km2.has_value());
    const auto joined = join_regions(a, b);
    CHECK(joined.regions == a.regions);
    CHECK(joined.values == std::vector<double>{2400, 1800, 800, 6000});
    CHECK(std::abs(pearson_r(a, joined) - 1.0) <= 1e-12);
    CHECK(std::abs(pearson_r(normalize_by_area(a), normalize_by_area(joined)) - 1.0) <= 1e-12);

    const auto other = load_region_csv(fixture("regions/other_regions.csv"));
    CHECK(code_of([&] { join_regions(a, other); }) == ErrorCode::RegionMismatch);

    const auto hand = load_region_csv(fixture("regions/hand_a.csv"));
    CHECK_FALSE(hand.area_km2.has_value());
    CHECK(code_of([&] { normalize_by_area(hand); }) == ErrorCode::MissingArea);
    CHECK(code_of([&] { normalize_by_area(load_region_csv(fixture("regions/bad_area.csv"))); }) ==
          ErrorCode::NonPositiveArea);
}
