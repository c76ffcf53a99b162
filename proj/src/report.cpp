#include "assim/report.hpp"

#include <charconv>
#include <cmath>

namespace assim {

using nlohmann::json;

json to_json(const PopulationSpec& pop) {
    json j{{"label", pop.label},
           {"country", pop.country},
           {"language", pop.language ? json(*pop.language) : json(nullptr)},
           {"expat_status", to_string(pop.expat_status)},
           {"age_min", pop.age_min},
           {"age_max", pop.age_max},
           {"gender", to_string(pop.gender)},
           {"education", to_string(pop.education)}};
    if (pop.expat_status == ExpatStatus::ExpatsFrom)
        j["expats_from"] = pop.expats_from;
    return j;
}

PopulationSpec population_from_json(const json& j) {
    if (!j.is_object())
        throw Error(ErrorCode::InvalidPopulation, "population must be a JSON object");
    PopulationSpec pop;
    try {
        pop.label = j.value("label", std::string{});
        pop.country = j.value("country", std::string{});
        if (j.contains("language") && !j["language"].is_null())
            pop.language = j["language"].get<std::string>();
        pop.expat_status = parse_expat_status(j.value("expat_status", std::string{"all"}));
        pop.expats_from = j.value("expats_from", std::string{});
        pop.age_min = j.value("age_min", 18);
        pop.age_max = j.value("age_max", 65);
        pop.gender = parse_gender(j.value("gender", std::string{"all"}));
        pop.education = parse_education(j.value("education", std::string{"all"}));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidPopulation, std::string("population: ") + e.what());
    }
    validate_population(pop);
    return pop;
}

json to_json(const ScoreReport& report) {
    json selected = json::array();
    for (const auto& s : report.selection.top_k) {
        selected.push_back({{"interest_id", s.id},
                            {"name", s.name},
                            {"distinctiveness", std::isinf(s.distinctiveness)
                                                    ? json(nullptr)
                                                    : json(s.distinctiveness)}});
    }
    json scores = json::array();
    for (const auto& s : report.per_interest)
        scores.push_back({{"interest_id", s.id}, {"score", s.score}});

    return json{{"triple",
                 {{"dest", to_json(report.triple.dest)},
                  {"target", to_json(report.triple.target)},
                  {"home", to_json(report.triple.home)}}},
                {"k_percent", report.triple.k_percent},
                {"universe_size", report.selection.universe_size},
                {"distinct_count", report.selection.distinctly_dest.size()},
                {"selected", std::move(selected)},
                {"scores", std::move(scores)},
                {"median_score", report.median_score}};
}

std::string dump_report(const ScoreReport& report) { return to_json(report).dump(2) + "\n"; }

std::vector<std::string> check_report_schema(const json& j) {
    std::vector<std::string> problems;
    auto require = [&](const json& obj, const char* key, auto&& pred, const char* what) {
        if (!obj.is_object() || !obj.contains(key)) {
            problems.push_back(std::string("missing '") + key + "'");
            return false;
        }
        if (!pred(obj[key])) {
            problems.push_back(std::string("'") + key + "' is not " + what);
            return false;
        }
        return true;
    };
    const auto is_obj = [](const json& v) { return v.is_object(); };
    const auto is_arr = [](const json& v) { return v.is_array(); };
    const auto is_num = [](const json& v) { return v.is_number(); };
    const auto is_uint = [](const json& v) { return v.is_number_unsigned(); };
    const auto is_str = [](const json& v) { return v.is_string(); };
    const auto is_ratio = [](const json& v) { return v.is_null() || (v.is_number() && v.get<double>() > 1.0); };
    const auto non_neg = [](const json& v) { return v.is_number() && v.get<double>() >= 0.0; };

    if (!j.is_object())
        return {"report is not an object"};
    if (require(j, "triple", is_obj, "an object"))
        for (const char* role : {"dest", "target", "home"})
            if (require(j["triple"], role, is_obj, "an object"))
                require(j["triple"][role], "label", is_str, "a string");
    if (require(j, "k_percent", is_num, "a number")) {
        const double k = j["k_percent"].get<double>();
        if (!(k > 0.0 && k <= 100.0))
            problems.push_back("'k_percent' outside (0, 100]");
    }
    require(j, "universe_size", is_uint, "a non-negative integer");
    require(j, "distinct_count", is_uint, "a non-negative integer");
    require(j, "median_score", non_neg, "a non-negative number");
    std::size_t n_selected = 0;
    if (require(j, "selected", is_arr, "an array")) {
        n_selected = j["selected"].size();
        for (const auto& s : j["selected"]) {
            require(s, "interest_id", is_str, "a string");
            require(s, "name", is_str, "a string");
            require(s, "distinctiveness", is_ratio, "a ratio > 1 or null");
        }
    }
    if (require(j, "scores", is_arr, "an array")) {
        if (j["scores"].size() != n_selected)
            problems.push_back("'scores' and 'selected' differ in length");
        for (const auto& s : j["scores"]) {
            require(s, "interest_id", is_str, "a string");
            require(s, "score", non_neg, "a non-negative number");
        }
    }
    if (problems.empty()) {
        if (j["distinct_count"].get<std::size_t>() < n_selected)
            problems.push_back("'distinct_count' smaller than the selection");
        if (j["universe_size"].get<std::size_t>() < j["distinct_count"].get<std::size_t>())
            problems.push_back("'universe_size' smaller than 'distinct_count'");
    }
    return problems;
}

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

} // namespace assim
