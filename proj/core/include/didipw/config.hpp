#pragma once

#include <string>
#include <vector>

#include "didipw/dataset.hpp"
#include "didipw/ingest.hpp"

namespace didipw {

// Run configuration: study design, variable mapping, and estimator settings,
// loaded from a JSON file (examples under data/ in the repository; schema in
// the README).
struct RunConfig {
    StudyDesign design;
    VariableMapping mapping;
    char delimiter = ',';
    DesignConfig estimator;                // outcome/covariate names filled at run time
    std::vector<std::string> outcomes;     // outcomes to estimate, in order
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Canonical JSON rendering of the resolved configuration, used in run
// manifests. Key order is deterministic.
std::string run_config_to_json(const RunConfig& config);

} // namespace didipw
