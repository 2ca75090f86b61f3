#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "didipw/csv.hpp"
#include "didipw/dataset.hpp"

namespace didipw {

// Canonical covariate keys in the frozen estimation order: child
// characteristics first, then household structure and wealth proxies.
const std::vector<std::string>& canonical_covariate_keys();

struct OutcomeSpec {
    std::string column;
    // When the column is missing or empty for a row, fall back to
    // bodyweight / height^2 from the mapped body-measure columns.
    bool derive_from_body_measures = false;
};

// Maps survey-extract column names onto the variables the design needs.
struct VariableMapping {
    std::string country;
    std::string year;
    std::map<std::string, OutcomeSpec> outcomes; // keyed by outcome name

    std::string age;
    std::string sex;
    std::string tv;
    std::string mother_home;
    std::string father_home;
    std::string cars;
    std::string computers;
    std::string well_off;
    std::string bedroom;

    std::string weight; // optional, BMI derivation
    std::string height; // optional, height in meters
    std::string school; // optional, school-year clustering

    std::vector<std::string> missing_sentinels = {"", "NA", "-99"};
    std::vector<std::string> expand_categorical; // canonical keys to dummy-expand

    const std::string& column_for(const std::string& key) const;
};

struct StudyDesign {
    std::string treatment_country;
    std::string control_country;
    int pre_year = 0;
    int post_year = 0;
    // First year in which the policy could affect outcomes; placebo runs must
    // stay strictly before it. Defaults to post_year when unset.
    std::optional<int> policy_year;

    void validate() const; // pre_year < post_year, countries distinct
};

// One parsed survey row; nullopt marks a missing value (empty field or a
// configured sentinel).
struct SurveyRecord {
    std::string country;
    std::optional<int> year;
    std::map<std::string, std::optional<double>> outcomes;
    std::map<std::string, std::optional<double>> covariates; // by canonical key
    std::optional<double> weight;
    std::optional<double> height;
    std::string school;
};

// Row counts for the sample restrictions, in the order they are applied:
// design filter first (not counted as drops), then missing outcome, then
// missing child fields (age, sex, TV, bedroom), then missing household
// fields (computers, cars, well-off, mother/father at home).
struct ExclusionReport {
    std::size_t rows_in_design = 0;
    std::size_t missing_outcome = 0;
    std::size_t missing_child_fields = 0;
    std::size_t missing_household_fields = 0;
    std::size_t retained = 0;
};

// Reads a delimiter-separated file and types the mapped columns. Errors name
// the offending row and column; a mapped column absent from the header is an
// error naming that column.
std::vector<SurveyRecord> load_table(const std::string& path, const VariableMapping& mapping,
                                     char delimiter = ',');
std::vector<SurveyRecord> load_records(const RawTable& table, const VariableMapping& mapping);

// bodyweight / (height in m)^2; nullopt for non-positive inputs.
std::optional<double> derive_bmi(double weight_kg, double height_m);

struct DesignResult {
    Dataset dataset;
    ExclusionReport exclusions;
};

// Keeps the two countries and two years of the design, assigns D and T,
// applies the listwise exclusions for the chosen outcome, and assembles the
// covariates in the frozen order (with optional dummy expansion). cluster_id
// is school x year when a school column is mapped.
DesignResult apply_design(const std::vector<SurveyRecord>& records, const StudyDesign& design,
                          const VariableMapping& mapping, const std::string& outcome_key);

struct DescriptiveRow {
    std::string variable;
    double mean_treated = 0.0;
    double sd_treated = 0.0;
    double mean_control = 0.0;
    double sd_control = 0.0;
    double mean_difference = 0.0;
    double p_value = 1.0; // Welch two-sample test
};

struct Descriptives {
    std::vector<DescriptiveRow> rows; // covariates then outcome
    std::size_t n_treated = 0;
    std::size_t n_control = 0;
};

// Per-variable mean and standard deviation by treatment group, mean
// difference, and unequal-variance t-test p-value.
Descriptives descriptives(const Dataset& ds, const std::string& outcome_label = "outcome");

// Welch statistic helper (exposed for oracle checks): p-value of the
// unequal-variance two-sample t-test given per-group moments.
double welch_p_value(double mean1, double var1, std::size_t n1, double mean2, double var2,
                     std::size_t n2);

} // namespace didipw
