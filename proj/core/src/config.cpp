#include "didipw/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace didipw {

namespace {

using nlohmann::json;

std::string get_string(const json& j, const std::string& key, const std::string& fallback = "") {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<std::string>();
}

char parse_delimiter(const std::string& text) {
    if (text == "," || text.empty()) return ',';
    if (text == "tab" || text == "\t") return '\t';
    if (text.size() == 1) return text[0];
    throw ValidationError("config: unsupported delimiter '" + text + "'");
}

TrimRule parse_trim_rule(const std::string& text) {
    if (text == "symmetric" || text.empty()) return TrimRule::symmetric;
    if (text == "denominators_only") return TrimRule::denominators_only;
    throw ValidationError("config: unknown trim_rule '" + text + "'");
}

const char* trim_rule_name(TrimRule rule) {
    return rule == TrimRule::symmetric ? "symmetric" : "denominators_only";
}

VariableMapping parse_mapping(const json& j) {
    VariableMapping m;
    m.country = get_string(j, "country");
    m.year = get_string(j, "year");
    for (const std::string& key : canonical_covariate_keys()) {
        const std::string column = get_string(j, key);
        if (column.empty()) {
            throw ValidationError("config: mapping is missing covariate column for '" + key +
                                  "'");
        }
        if (key == "age") m.age = column;
        else if (key == "sex") m.sex = column;
        else if (key == "tv") m.tv = column;
        else if (key == "mother_home") m.mother_home = column;
        else if (key == "father_home") m.father_home = column;
        else if (key == "cars") m.cars = column;
        else if (key == "computers") m.computers = column;
        else if (key == "well_off") m.well_off = column;
        else if (key == "bedroom") m.bedroom = column;
    }
    if (m.country.empty() || m.year.empty()) {
        throw ValidationError("config: mapping requires 'country' and 'year' columns");
    }
    if (!j.contains("outcomes") || !j.at("outcomes").is_object() || j.at("outcomes").empty()) {
        throw ValidationError("config: mapping requires at least one outcome");
    }
    for (const auto& [name, spec] : j.at("outcomes").items()) {
        OutcomeSpec out;
        if (spec.is_string()) {
            out.column = spec.get<std::string>();
        } else {
            out.column = get_string(spec, "column");
            out.derive_from_body_measures = spec.value("derive_from_body_measures", false);
        }
        if (out.column.empty()) {
            throw ValidationError("config: outcome '" + name + "' has no column");
        }
        m.outcomes[name] = out;
    }
    m.weight = get_string(j, "weight");
    m.height = get_string(j, "height");
    m.school = get_string(j, "school");
    if (j.contains("missing_sentinels")) {
        m.missing_sentinels = j.at("missing_sentinels").get<std::vector<std::string>>();
    }
    if (j.contains("expand_categorical")) {
        m.expand_categorical = j.at("expand_categorical").get<std::vector<std::string>>();
    }
    return m;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig cfg;
    if (!j.contains("design")) throw ValidationError("config: missing 'design' section");
    const json& d = j.at("design");
    cfg.design.treatment_country = get_string(d, "treatment_country");
    cfg.design.control_country = get_string(d, "control_country");
    cfg.design.pre_year = d.value("pre_year", 0);
    cfg.design.post_year = d.value("post_year", 0);
    if (d.contains("policy_year")) cfg.design.policy_year = d.at("policy_year").get<int>();
    cfg.design.validate();

    if (!j.contains("mapping")) throw ValidationError("config: missing 'mapping' section");
    cfg.mapping = parse_mapping(j.at("mapping"));

    cfg.delimiter = parse_delimiter(get_string(j, "delimiter", ","));

    if (j.contains("estimator")) {
        const json& e = j.at("estimator");
        cfg.estimator.trim_threshold = e.value("trim", 0.05);
        cfg.estimator.bootstrap_reps = e.value("bootstrap", 1999);
        cfg.estimator.seed = e.value("seed", static_cast<std::int64_t>(0));
        if (e.contains("cluster") && !e.at("cluster").is_null()) {
            cfg.estimator.cluster_by = e.at("cluster").get<std::string>();
        }
        cfg.estimator.hajek_normalization = e.value("hajek", false);
        cfg.estimator.percentile_ci = e.value("percentile_ci", false);
        cfg.estimator.refit_after_trim = e.value("refit_after_trim", false);
        cfg.estimator.trim_rule = parse_trim_rule(e.value("trim_rule", std::string{}));
        cfg.estimator.max_threads = e.value("max_threads", 0);
        cfg.estimator.validate();
    }

    if (j.contains("outcomes")) {
        cfg.outcomes = j.at("outcomes").get<std::vector<std::string>>();
    } else {
        for (const auto& [name, spec] : cfg.mapping.outcomes) cfg.outcomes.push_back(name);
    }
    for (const std::string& name : cfg.outcomes) {
        if (cfg.mapping.outcomes.find(name) == cfg.mapping.outcomes.end()) {
            throw ValidationError("config: outcome '" + name + "' is not mapped");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("config: cannot open file " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j;
    j["design"] = {
        {"treatment_country", cfg.design.treatment_country},
        {"control_country", cfg.design.control_country},
        {"pre_year", cfg.design.pre_year},
        {"post_year", cfg.design.post_year},
    };
    if (cfg.design.policy_year) j["design"]["policy_year"] = *cfg.design.policy_year;

    json m;
    m["country"] = cfg.mapping.country;
    m["year"] = cfg.mapping.year;
    for (const std::string& key : canonical_covariate_keys()) {
        m[key] = cfg.mapping.column_for(key);
    }
    json outs;
    for (const auto& [name, spec] : cfg.mapping.outcomes) {
        outs[name] = {{"column", spec.column},
                      {"derive_from_body_measures", spec.derive_from_body_measures}};
    }
    m["outcomes"] = outs;
    if (!cfg.mapping.weight.empty()) m["weight"] = cfg.mapping.weight;
    if (!cfg.mapping.height.empty()) m["height"] = cfg.mapping.height;
    if (!cfg.mapping.school.empty()) m["school"] = cfg.mapping.school;
    m["missing_sentinels"] = cfg.mapping.missing_sentinels;
    if (!cfg.mapping.expand_categorical.empty()) {
        m["expand_categorical"] = cfg.mapping.expand_categorical;
    }
    j["mapping"] = m;

    j["delimiter"] = cfg.delimiter == '\t' ? "tab" : std::string(1, cfg.delimiter);
    j["estimator"] = {
        {"trim", cfg.estimator.trim_threshold},
        {"bootstrap", cfg.estimator.bootstrap_reps},
        {"seed", cfg.estimator.seed},
        {"cluster", cfg.estimator.cluster_by ? json(*cfg.estimator.cluster_by) : json(nullptr)},
        {"hajek", cfg.estimator.hajek_normalization},
        {"percentile_ci", cfg.estimator.percentile_ci},
        {"refit_after_trim", cfg.estimator.refit_after_trim},
        {"trim_rule", trim_rule_name(cfg.estimator.trim_rule)},
    };
    j["outcomes"] = cfg.outcomes;
    return j.dump(2);
}

} // namespace didipw
