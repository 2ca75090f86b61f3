#include "didipw/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "didipw/normal.hpp"

namespace didipw {

const std::vector<std::string>& canonical_covariate_keys() {
    static const std::vector<std::string> keys = {
        "age",  "sex",       "tv",       "mother_home", "father_home",
        "cars", "computers", "well_off", "bedroom",
    };
    return keys;
}

const std::string& VariableMapping::column_for(const std::string& key) const {
    if (key == "age") return age;
    if (key == "sex") return sex;
    if (key == "tv") return tv;
    if (key == "mother_home") return mother_home;
    if (key == "father_home") return father_home;
    if (key == "cars") return cars;
    if (key == "computers") return computers;
    if (key == "well_off") return well_off;
    if (key == "bedroom") return bedroom;
    throw ValidationError("unknown covariate key: " + key);
}

void StudyDesign::validate() const {
    if (treatment_country.empty() || control_country.empty()) {
        throw ValidationError("design: treatment and control countries are required");
    }
    if (treatment_country == control_country) {
        throw ValidationError("design: treatment and control countries must differ");
    }
    if (pre_year >= post_year) {
        throw ValidationError("design: pre_year must precede post_year");
    }
}

namespace {

bool is_sentinel(const std::string& field, const std::vector<std::string>& sentinels) {
    return std::find(sentinels.begin(), sentinels.end(), field) != sentinels.end();
}

std::optional<double> parse_numeric(const std::string& field,
                                    const std::vector<std::string>& sentinels,
                                    std::size_t row_no, const std::string& column) {
    if (is_sentinel(field, sentinels)) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ValidationError("row " + std::to_string(row_no) + ", column '" + column +
                              "': cannot parse numeric value '" + field + "'");
    }
    return v;
}

int require_column(const RawTable& table, const std::string& name) {
    const int idx = table.column(name);
    if (idx < 0) {
        throw ValidationError("mapped column '" + name + "' not found in input header");
    }
    return idx;
}

std::string format_code(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::vector<SurveyRecord> load_records(const RawTable& table, const VariableMapping& mapping) {
    const int country_col = require_column(table, mapping.country);
    const int year_col = require_column(table, mapping.year);

    std::vector<std::pair<std::string, int>> covariate_cols;
    for (const std::string& key : canonical_covariate_keys()) {
        covariate_cols.emplace_back(key, require_column(table, mapping.column_for(key)));
    }
    std::vector<std::pair<std::string, int>> outcome_cols;
    for (const auto& [name, spec] : mapping.outcomes) {
        outcome_cols.emplace_back(name, require_column(table, spec.column));
    }
    const int weight_col = mapping.weight.empty() ? -1 : require_column(table, mapping.weight);
    const int height_col = mapping.height.empty() ? -1 : require_column(table, mapping.height);
    const int school_col = mapping.school.empty() ? -1 : require_column(table, mapping.school);

    std::vector<SurveyRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t row_no = r + 2; // 1-based, after the header
        SurveyRecord rec;
        rec.country = row[static_cast<std::size_t>(country_col)];

        const std::string& year_field = row[static_cast<std::size_t>(year_col)];
        if (is_sentinel(year_field, mapping.missing_sentinels)) {
            rec.year = std::nullopt;
        } else {
            const auto y = parse_numeric(year_field, mapping.missing_sentinels, row_no,
                                         mapping.year);
            rec.year = static_cast<int>(*y);
        }

        for (const auto& [key, col] : covariate_cols) {
            rec.covariates[key] = parse_numeric(row[static_cast<std::size_t>(col)],
                                                mapping.missing_sentinels, row_no,
                                                mapping.column_for(key));
        }
        for (const auto& [name, col] : outcome_cols) {
            rec.outcomes[name] = parse_numeric(row[static_cast<std::size_t>(col)],
                                               mapping.missing_sentinels, row_no,
                                               mapping.outcomes.at(name).column);
        }
        if (weight_col >= 0) {
            rec.weight = parse_numeric(row[static_cast<std::size_t>(weight_col)],
                                       mapping.missing_sentinels, row_no, mapping.weight);
        }
        if (height_col >= 0) {
            rec.height = parse_numeric(row[static_cast<std::size_t>(height_col)],
                                       mapping.missing_sentinels, row_no, mapping.height);
        }
        if (school_col >= 0) {
            rec.school = row[static_cast<std::size_t>(school_col)];
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SurveyRecord> load_table(const std::string& path, const VariableMapping& mapping,
                                     char delimiter) {
    return load_records(read_delimited_file(path, delimiter), mapping);
}

std::optional<double> derive_bmi(double weight_kg, double height_m) {
    if (!(weight_kg > 0.0) || !(height_m > 0.0)) return std::nullopt;
    return weight_kg / (height_m * height_m);
}

DesignResult apply_design(const std::vector<SurveyRecord>& records, const StudyDesign& design,
                          const VariableMapping& mapping, const std::string& outcome_key) {
    design.validate();
    const auto outcome_it = mapping.outcomes.find(outcome_key);
    if (outcome_it == mapping.outcomes.end()) {
        throw ValidationError("outcome '" + outcome_key + "' is not in the variable mapping");
    }
    const bool derive = outcome_it->second.derive_from_body_measures;

    static const std::vector<std::string> child_keys = {"age", "sex", "tv", "bedroom"};
    static const std::vector<std::string> household_keys = {"computers", "cars", "well_off",
                                                            "mother_home", "father_home"};

    ExclusionReport report;
    std::vector<const SurveyRecord*> kept;
    std::vector<double> outcome_values;
    for (const SurveyRecord& rec : records) {
        const bool treated = rec.country == design.treatment_country;
        const bool control = rec.country == design.control_country;
        if (!treated && !control) continue;
        if (!rec.year || (*rec.year != design.pre_year && *rec.year != design.post_year)) {
            continue;
        }
        ++report.rows_in_design;

        std::optional<double> outcome = rec.outcomes.at(outcome_key);
        if (!outcome && derive && rec.weight && rec.height) {
            outcome = derive_bmi(*rec.weight, *rec.height);
        }
        if (!outcome) {
            ++report.missing_outcome;
            continue;
        }
        const auto missing_any = [&rec](const std::vector<std::string>& keys) {
            for (const std::string& k : keys) {
                if (!rec.covariates.at(k)) return true;
            }
            return false;
        };
        if (missing_any(child_keys)) {
            ++report.missing_child_fields;
            continue;
        }
        if (missing_any(household_keys)) {
            ++report.missing_household_fields;
            continue;
        }
        ++report.retained;
        kept.push_back(&rec);
        outcome_values.push_back(*outcome);
    }

    // Covariate schema: canonical keys, with configured categorical keys
    // expanded into one dummy per non-base level (lowest code is the base).
    std::map<std::string, std::vector<double>> levels;
    for (const std::string& key : mapping.expand_categorical) {
        std::set<double> values;
        for (const SurveyRecord* rec : kept) values.insert(*rec->covariates.at(key));
        levels[key] = std::vector<double>(values.begin(), values.end());
    }

    std::vector<std::string> covariate_names;
    for (const std::string& key : canonical_covariate_keys()) {
        const auto it = levels.find(key);
        if (it == levels.end()) {
            covariate_names.push_back(key);
        } else {
            for (std::size_t v = 1; v < it->second.size(); ++v) {
                covariate_names.push_back(key + "=" + format_code(it->second[v]));
            }
        }
    }

    std::vector<Record> rows;
    rows.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const SurveyRecord& rec = *kept[i];
        Record r;
        r.outcome = outcome_values[i];
        r.treated = rec.country == design.treatment_country ? 1.0 : 0.0;
        r.post = *rec.year == design.post_year ? 1.0 : 0.0;
        for (const std::string& key : canonical_covariate_keys()) {
            const double value = *rec.covariates.at(key);
            const auto it = levels.find(key);
            if (it == levels.end()) {
                r.covariates.emplace_back(value);
            } else {
                for (std::size_t v = 1; v < it->second.size(); ++v) {
                    r.covariates.emplace_back(value == it->second[v] ? 1.0 : 0.0);
                }
            }
        }
        r.unit_id = std::to_string(i);
        if (!rec.school.empty()) {
            r.cluster_id = rec.school + "_" + std::to_string(*rec.year);
        } else {
            r.cluster_id = r.unit_id;
        }
        rows.push_back(std::move(r));
    }

    DesignConfig dc;
    dc.outcome_name = outcome_key;
    dc.covariate_names = covariate_names;

    DesignResult result{build_dataset(rows, dc), report};
    return result;
}

double welch_p_value(double mean1, double var1, std::size_t n1, double mean2, double var2,
                     std::size_t n2) {
    const double diff = mean1 - mean2;
    if (n1 < 2 || n2 < 2) {
        return diff == 0.0 ? 1.0 : 0.0;
    }
    const double se1 = var1 / static_cast<double>(n1);
    const double se2 = var2 / static_cast<double>(n2);
    const double se = se1 + se2;
    if (se == 0.0) {
        return diff == 0.0 ? 1.0 : 0.0;
    }
    const double t = diff / std::sqrt(se);
    const double df = se * se /
                      (se1 * se1 / static_cast<double>(n1 - 1) +
                       se2 * se2 / static_cast<double>(n2 - 1));
    return 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

Moments moments(const std::vector<double>& values) {
    Moments m;
    m.n = values.size();
    if (m.n == 0) return m;
    KahanSum sum;
    for (double v : values) sum.add(v);
    m.mean = sum.value() / static_cast<double>(m.n);
    if (m.n > 1) {
        KahanSum sq;
        for (double v : values) sq.add((v - m.mean) * (v - m.mean));
        m.var = sq.value() / static_cast<double>(m.n - 1);
    }
    return m;
}

} // namespace

Descriptives descriptives(const Dataset& ds, const std::string& outcome_label) {
    Descriptives out;
    const std::size_t k = ds.covariate_count();

    std::vector<std::vector<double>> treated(k + 1), control(k + 1);
    for (const Observation& o : ds.observations) {
        auto& bucket = o.treated ? treated : control;
        for (std::size_t j = 0; j < k; ++j) bucket[j].push_back(o.covariates[j]);
        bucket[k].push_back(o.outcome);
    }
    out.n_treated = treated[k].size();
    out.n_control = control[k].size();

    for (std::size_t j = 0; j <= k; ++j) {
        const Moments mt = moments(treated[j]);
        const Moments mc = moments(control[j]);
        DescriptiveRow row;
        row.variable = j < k ? ds.covariate_names[j] : outcome_label;
        row.mean_treated = mt.mean;
        row.sd_treated = std::sqrt(mt.var);
        row.mean_control = mc.mean;
        row.sd_control = std::sqrt(mc.var);
        row.mean_difference = mt.mean - mc.mean;
        row.p_value = welch_p_value(mt.mean, mt.var, mt.n, mc.mean, mc.var, mc.n);
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace didipw
