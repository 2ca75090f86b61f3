#pragma once

// Shared helpers for the unit and acceptance suites.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "didipw/dataset.hpp"
#include "didipw/dgp.hpp"
#include "didipw/rng.hpp"

namespace testutil {

// A fresh directory under the system temp root.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    auto path = std::filesystem::temp_directory_path() /
                ("didipw_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
    std::filesystem::create_directories(path);
    return path;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Minimal valid design: one observation per (d,t) cell, no covariates.
inline didipw::Dataset minimal_dataset(double y00 = 2.0, double y01 = 2.0, double y10 = 3.0,
                                       double y11 = 4.0) {
    std::vector<didipw::Record> rows(4);
    rows[0].outcome = y00; rows[0].treated = 0.0; rows[0].post = 0.0;
    rows[1].outcome = y01; rows[1].treated = 0.0; rows[1].post = 1.0;
    rows[2].outcome = y10; rows[2].treated = 1.0; rows[2].post = 0.0;
    rows[3].outcome = y11; rows[3].treated = 1.0; rows[3].post = 1.0;
    didipw::DesignConfig cfg;
    return didipw::build_dataset(rows, cfg);
}

// Random dataset with roughly balanced cells. k = 0 gives intercept-only
// estimation. Cell shares stay far above the default trimming threshold.
inline didipw::Dataset random_dataset(didipw::Rng& rng, std::size_t n, std::size_t k) {
    std::vector<didipw::Record> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        didipw::Record r;
        const auto cell = i < 4 ? i : rng.next_below(4); // guarantee non-empty cells
        r.treated = cell >= 2 ? 1.0 : 0.0;
        r.post = (cell & 1) ? 1.0 : 0.0;
        r.outcome = 2.0 * rng.next_normal() + 0.5 * static_cast<double>(cell);
        for (std::size_t j = 0; j < k; ++j) r.covariates.push_back(rng.next_normal());
        r.unit_id = std::to_string(i);
        r.cluster_id = r.unit_id;
        rows.push_back(std::move(r));
    }
    didipw::DesignConfig cfg;
    for (std::size_t j = 1; j <= k; ++j) cfg.covariate_names.push_back("x" + std::to_string(j));
    return didipw::build_dataset(rows, cfg);
}

// Drops the covariates so the estimation runs intercept-only.
inline didipw::Dataset strip_covariates(const didipw::Dataset& ds) {
    std::vector<didipw::Observation> obs = ds.observations;
    for (auto& o : obs) o.covariates.clear();
    return didipw::rebuild_dataset(std::move(obs), {});
}

// Canonical survey column set used by the CLI tests.
inline std::string survey_config_json(const std::string& extra_estimator = "") {
    std::string estimator = R"("trim": 0.05, "bootstrap": 199, "seed": 7)";
    if (!extra_estimator.empty()) estimator += ", " + extra_estimator;
    return std::string(R"({
  "design": {"treatment_country": "TRT", "control_country": "CTL",
             "pre_year": 2010, "post_year": 2014, "policy_year": 2011},
  "mapping": {
    "country": "country", "year": "year",
    "outcomes": {"soda": "soda_freq",
                 "bmi": {"column": "bmi", "derive_from_body_measures": true}},
    "age": "age", "sex": "female", "tv": "tv_weekday",
    "mother_home": "mother_home", "father_home": "father_home",
    "cars": "cars", "computers": "computers", "well_off": "well_off",
    "bedroom": "own_bedroom",
    "weight": "weight_kg", "height": "height_m", "school": "school"
  },
  "estimator": {)") +
           estimator + R"(},
  "outcomes": ["soda"]
})";
}

// Writes a synthetic dataset as a survey extract whose ingestion reproduces
// the covariates in the original order. Requires exactly 9 covariates
// (the canonical survey variables).
inline void write_survey_csv(const didipw::Dataset& ds, const std::filesystem::path& path,
                             int schools = 12, int pre_year = 2010, int post_year = 2014) {
    std::ostringstream out;
    out << "country,year,soda_freq,bmi,age,female,tv_weekday,mother_home,father_home,cars,"
           "computers,well_off,own_bedroom,weight_kg,height_m,school\n";
    out.precision(17);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const didipw::Observation& o = ds.observations[i];
        out << (o.treated ? "TRT" : "CTL") << ',' << (o.post ? post_year : pre_year) << ','
            << o.outcome << ',' << 20.0 + 0.1 * static_cast<double>(i % 30);
        for (double x : o.covariates) out << ',' << x;
        out << ',' << 50.0 + static_cast<double>(i % 20) << ',' << 1.5
            << ",sch" << (i % static_cast<std::size_t>(schools)) << "\n";
    }
    write_file(path, out.str());
}

} // namespace testutil
