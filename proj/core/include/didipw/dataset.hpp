#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "didipw/common.hpp"

namespace didipw {

// One survey respondent in the repeated cross-section: outcome Y, treatment
// group flag D, period flag T, covariate vector X, and bookkeeping labels.
struct Observation {
    double outcome = 0.0;
    std::uint8_t treated = 0; // D in {0,1}
    std::uint8_t post = 0;    // T in {0,1}
    std::vector<double> covariates;
    std::string cluster_id;
    std::string unit_id;

    std::size_t cell() const noexcept { return cell_index(treated, post); }
};

// Validated collection of observations plus the covariate schema. Immutable
// after construction; safe for concurrent reads.
struct Dataset {
    std::vector<Observation> observations;
    std::vector<std::string> covariate_names;
    std::array<std::size_t, 4> cell_counts{}; // indexed by cell_index(d,t)

    std::size_t size() const noexcept { return observations.size(); }
    std::size_t covariate_count() const noexcept { return covariate_names.size(); }
};

// How trimming treats the four estimated cell probabilities. The default
// checks the three denominator probabilities for every row and additionally
// requires rho_{1,1} above the threshold for treated-post rows.
enum class TrimRule {
    symmetric,
    denominators_only,
};

// Estimation settings shared across the chain. Defaults follow the
// published procedure: trim at 0.05, 1999 bootstrap replications.
struct DesignConfig {
    std::string outcome_name = "outcome";
    std::vector<std::string> covariate_names;
    double trim_threshold = 0.05;
    int bootstrap_reps = 1999;
    std::optional<std::string> cluster_by;
    std::int64_t seed = 0;

    // Estimator variants, all off by default.
    bool hajek_normalization = false;
    bool refit_after_trim = false;
    bool percentile_ci = false;
    TrimRule trim_rule = TrimRule::symmetric;
    int max_threads = 0; // 0 = hardware concurrency

    // Throws ValidationError when trim_threshold is outside [0, 0.5) or
    // bootstrap_reps < 1.
    void validate() const;
};

// Raw tabular record as handed to build_dataset. Missing values are
// std::nullopt; ingestion resolves missingness before this point, so any
// nullopt here is a hard validation error.
struct Record {
    std::optional<double> outcome;
    std::optional<double> treated;
    std::optional<double> post;
    std::vector<std::optional<double>> covariates;
    std::string cluster_id;
    std::string unit_id;
};

// Validates records against the design and assembles a Dataset. Covariate
// ordering matches config.covariate_names; no intercept column is stored
// (model fitting adds it).
//
// Errors: ValidationError for non-binary D/T, missing fields, or covariate
// arity mismatches (message names the record index); DesignError when a
// (d,t) cell ends up empty (message names the cell).
Dataset build_dataset(const std::vector<Record>& rows, const DesignConfig& config);

// Rebuilds a Dataset from existing observations (revalidates counts and
// cell coverage). build_dataset followed by rebuild is idempotent.
Dataset rebuild_dataset(std::vector<Observation> observations,
                        std::vector<std::string> covariate_names);

// Arithmetic mean of the outcome within each (d,t) cell, compensated
// summation, indexed by cell_index.
std::array<double, 4> cell_means(const Dataset& ds);

} // namespace didipw
