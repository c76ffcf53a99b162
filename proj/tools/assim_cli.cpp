// assim: command-line front end.
//
//   assim score      --dest D.csv --target T.csv --home H.csv [--k 50] [--out report.json]
//   assim robustness --dest D.csv --target T.csv --home H.csv --sizes 100:2900:100
//                    --trials 1 --seed 7 --out-csv stability.csv [--summary summary.json]
//   assim validate   --a A.csv --b B.csv [--per-area]
//   assim synth      --alpha 0.5 --interests 2907 --seed 1 --out-dir DIR
//   assim fetch      --interests list.csv --out table.csv [--provider-url URL]
//
// Every command also accepts --config FILE.json; its keys are option names
// without the leading dashes, and flags given on the command line win.
// Exit codes: 0 success, 2 input/config error, 3 degenerate method outcome.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "assim/analysis.hpp"
#include "assim/ingestion.hpp"
#include "assim/provider.hpp"
#include "assim/random.hpp"
#include "assim/report.hpp"
#include "assim/scoring.hpp"
#include "assim/synth.hpp"

namespace {

using nlohmann::json;
using namespace assim;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorCode::ParseError, "config '" + path + "' is not a JSON object");
    return j;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary | std::ios::trunc);
    if (!out || std::filesystem::is_directory(*path))
        throw Error(ErrorCode::IoError, "cannot write '" + *path + "'");
    out << text;
    if (!out)
        throw Error(ErrorCode::IoError, "write to '" + *path + "' failed");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

PopulationSpec default_population(const std::string& label) {
    PopulationSpec p;
    p.label = label;
    p.country = label;
    return p;
}

PopulationSpec population_from_config(const json& config, const std::string& role) {
    const auto key = role + "_population";
    if (config.contains(key))
        return population_from_json(config[key]);
    return default_population(role);
}

struct TripleArgs {
    std::string dest, target, home;
    double k = 50.0;
};

struct Tables {
    AudienceTable dest, target, home;
};

Tables load_triple(const TripleArgs& args, const json& config) {
    return {load_audience_csv(args.dest, population_from_config(config, "dest")),
            load_audience_csv(args.target, population_from_config(config, "target")),
            load_audience_csv(args.home, population_from_config(config, "home"))};
}

void warn_dropped(const std::vector<std::string>& dropped) {
    if (dropped.empty())
        return;
    std::cerr << "warning: dropped " << dropped.size() << " interests not shared by all tables:";
    for (std::size_t i = 0; i < dropped.size() && i < 20; ++i)
        std::cerr << ' ' << dropped[i];
    if (dropped.size() > 20)
        std::cerr << " ...";
    std::cerr << '\n';
}

// Option names of `sub` that the config file may set.
std::vector<std::string> config_args(CLI::App& sub, const json& config) {
    std::vector<std::string> args;
    for (const auto& [raw_key, value] : config.items()) {
        std::string key = raw_key;
        // population objects are read separately
        if (key == "config" || key == "population" || key == "dest_population" ||
            key == "target_population" || key == "home_population")
            continue;
        std::replace(key.begin(), key.end(), '_', '-');
        if (sub.get_option_no_throw("--" + key) == nullptr)
            throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' is not an option of '" +
                                                      sub.get_name() + "'");
        if (value.is_boolean()) {
            if (value.get<bool>())
                args.push_back("--" + key);
        } else if (value.is_string()) {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            args.push_back("--" + key);
            args.push_back(value.dump());
        } else {
            throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' must be a scalar");
        }
    }
    return args;
}

std::optional<std::string> find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc)
            return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0)
            return a.substr(9);
    }
    return std::nullopt;
}

int run(int argc, char** argv) {
    CLI::App app{"Interest-based assimilation scores from audience estimates"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file with default option values");
    };

    TripleArgs triple;
    auto add_triple = [&](CLI::App* sub) {
        sub->add_option("--dest", triple.dest, "destination population audience CSV")->required();
        sub->add_option("--target", triple.target, "target population audience CSV")->required();
        sub->add_option("--home", triple.home, "home population audience CSV")->required();
        sub->add_option("--k", triple.k, "percent of distinctly-destination interests kept");
    };

    // score
    auto* score = app.add_subcommand("score", "score a dest/target/home triple");
    std::optional<std::string> score_out;
    bool cap = false;
    add_triple(score);
    add_config(score);
    score->add_option("--out", score_out, "report path (stdout when omitted)");
    score->add_flag("--cap", cap, "clip per-interest scores at 1 before the median");

    // robustness
    auto* robust = app.add_subcommand("robustness", "median score over random interest subsets");
    std::string sizes_spec = "100:2900:100";
    int trials = 1;
    std::uint64_t seed = 0;
    std::size_t floor = 500;
    std::string stability_csv;
    std::optional<std::string> summary_out;
    bool serial = false;
    add_triple(robust);
    add_config(robust);
    robust->add_option("--sizes", sizes_spec, "start:stop:step, stop inclusive");
    robust->add_option("--trials", trials, "samples per size");
    robust->add_option("--seed", seed, "random seed");
    robust->add_option("--floor", floor, "smallest size used for the relative-change statistics");
    robust->add_option("--out-csv", stability_csv, "stability series CSV")->required();
    robust->add_option("--summary", summary_out, "summary JSON path (stdout when omitted)");
    robust->add_flag("--serial", serial, "run trials on one thread");

    // validate
    auto* validate = app.add_subcommand("validate", "Pearson correlation of two region series");
    std::string region_a, region_b;
    bool per_area = false;
    std::optional<std::string> validate_out;
    add_config(validate);
    validate->add_option("--a", region_a, "region CSV (region,value,area_km2)")->required();
    validate->add_option("--b", region_b, "region CSV (region,value,area_km2)")->required();
    validate->add_flag("--per-area", per_area, "divide values by area_km2 first");
    validate->add_option("--out", validate_out, "output path (stdout when omitted)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic triple with known score");
    SynthConfig sc;
    std::string out_dir;
    std::string scale_population = "none";
    add_config(synth);
    synth->add_option("--alpha", sc.alpha, "target mixture weight on dest shares")->required();
    synth->add_option("--interests", sc.n_interests, "number of interests")->required();
    synth->add_option("--seed", sc.seed, "random seed")->required();
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->add_option("--concentration", sc.dirichlet_concentration, "Dirichlet concentration");
    synth->add_option("--dest-total", sc.dest_total, "dest population total audience");
    synth->add_option("--home-total", sc.home_total, "home population total audience");
    synth->add_option("--target-total", sc.target_total, "target population total audience");
    synth->add_option("--activity-scale", sc.activity_scale, "factor applied to one population");
    synth->add_option("--scale-population", scale_population, "none, dest, home or target");
    synth->add_option("--k", sc.k_percent, "k used for the oracle median");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "fetch an audience table from a provider");
    ProviderConfig pc;
    std::string interests_path, fetch_out;
    double window_s = pc.window.count(), ttl_s = pc.cache_ttl.count(), backoff_s = pc.backoff_base.count();
    PopulationSpec pop = default_population("population");
    std::string language, expat_status = "all", gender = "all", education = "all";
    add_config(fetch);
    fetch->add_option("--interests", interests_path, "interest list CSV (interest_id,interest_name)")->required();
    fetch->add_option("--out", fetch_out, "audience CSV to write")->required();
    fetch->add_option("--provider-url", pc.base_url, "provider base URL (ASSIM_PROVIDER_URL wins)");
    fetch->add_option("--max-requests", pc.max_requests_per_window, "requests allowed per window");
    fetch->add_option("--window", window_s, "rate window in seconds");
    fetch->add_option("--max-retries", pc.max_retries, "attempts per interest");
    fetch->add_option("--cache-ttl", ttl_s, "cache lifetime in seconds");
    fetch->add_option("--backoff", backoff_s, "initial retry backoff in seconds");
    fetch->add_option("--concurrency", pc.concurrency, "parallel requests");
    fetch->add_option("--label", pop.label, "population label");
    fetch->add_option("--country", pop.country, "country code or region set");
    fetch->add_option("--language", language, "language code");
    fetch->add_option("--expat-status", expat_status, "all, expats_all, non_expats, expats_from");
    fetch->add_option("--expats-from", pop.expats_from, "origin country for expats_from");
    fetch->add_option("--age-min", pop.age_min, "minimum age");
    fetch->add_option("--age-max", pop.age_max, "maximum age");
    fetch->add_option("--gender", gender, "all, men, women");
    fetch->add_option("--education", education, "all, university_graduate, not_university");

    // config values go first so command-line flags override them
    json config = json::object();
    std::vector<std::string> args(argv, argv + argc);
    if (const auto path = find_config_path(argc, argv); path && argc > 1) {
        config = read_json_file(*path);
        if (auto* sub = app.get_subcommand_no_throw(argv[1])) {
            auto extra = config_args(*sub, config);
            args.insert(args.begin() + 2, extra.begin(), extra.end());
        }
    }
    std::vector<char*> cargs;
    for (auto& a : args)
        cargs.push_back(a.data());

    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "UsageError: " << e.what() << '\n';
        return kExitInput;
    }

    if (*score) {
        validate_k(triple.k);
        const auto t = load_triple(triple, config);
        const auto aligned = align_tables(t.dest, t.target, t.home);
        warn_dropped(aligned.dropped_ids);
        const auto report = score_aligned(aligned, triple.k, {cap});
        write_text(score_out, dump_report(report));
        return kExitOk;
    }

    if (*robust) {
        validate_k(triple.k);
        StabilityConfig cfg;
        cfg.k_percent = triple.k;
        cfg.sizes = parse_size_spec(sizes_spec);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.stability_floor = floor;
        const auto t = load_triple(triple, config);
        const auto series = serial ? subset_stability_serial(t.dest, t.target, t.home, cfg)
                                   : subset_stability(t.dest, t.target, t.home, cfg);
        write_stability_csv(series, stability_csv);
        const json summary{{"max_rel_change", number_or_null(series.max_rel_change)},
                           {"avg_rel_change", number_or_null(series.avg_rel_change)},
                           {"stability_floor", series.stability_floor},
                           {"mean_score", number_or_null(series.mean_score)},
                           {"misses", series.misses},
                           {"trials", series.trials_per_size},
                           {"seed", series.seed},
                           {"rng", kRngAlgorithm}};
        write_text(summary_out, summary.dump(2) + "\n");
        return kExitOk;
    }

    if (*validate) {
        auto a = load_region_csv(region_a);
        auto b = load_region_csv(region_b);
        if (per_area) {
            a = normalize_by_area(a);
            b = normalize_by_area(b);
        }
        b = join_regions(a, b);
        const json out{{"pearson_r", pearson_r(a, b)}, {"n_regions", a.regions.size()}};
        write_text(validate_out, out.dump(2) + "\n");
        return kExitOk;
    }

    if (*synth) {
        if (scale_population == "none")
            sc.scaled = ScaledPopulation::None;
        else if (scale_population == "dest")
            sc.scaled = ScaledPopulation::Dest;
        else if (scale_population == "home")
            sc.scaled = ScaledPopulation::Home;
        else if (scale_population == "target")
            sc.scaled = ScaledPopulation::Target;
        else
            throw Error(ErrorCode::InvalidConfig, "unknown --scale-population '" + scale_population + "'");
        const auto generated = generate_triple(sc);
        write_synth_outputs(generated, sc, out_dir);
        return kExitOk;
    }

    if (*fetch) {
        if (const char* env = std::getenv("ASSIM_PROVIDER_URL"); env && *env)
            pc.base_url = env;
        pc.window = Seconds{window_s};
        pc.cache_ttl = Seconds{ttl_s};
        pc.backoff_base = Seconds{backoff_s};
        if (!language.empty())
            pop.language = language;
        pop.expat_status = parse_expat_status(expat_status);
        pop.gender = parse_gender(gender);
        pop.education = parse_education(education);
        if (config.contains("population"))
            pop = population_from_json(config["population"]);
        validate_population(pop);
        const auto interests = load_interest_list(interests_path);
        AudienceClient client(pc, make_http_transport(pc.base_url));
        const auto table = client.fetch(pop, interests);
        write_audience_csv(table, fetch_out);
        return kExitOk;
    }
    return kExitInput;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const assim::Error& e) {
        std::cerr << assim::to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == assim::ErrorCode::NoDistinctiveInterests ? kExitDegenerate : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << '\n';
        return kExitInternal;
    }
}
