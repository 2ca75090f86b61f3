#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didipw/dataset.hpp"

namespace didipw {

struct InferenceResult {
    double effect = 0.0;
    double std_error = 0.0;
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int replications_used = 0;
    int failed_replications = 0;
    std::int64_t seed = 0;
    std::size_t n_obs = 0; // dataset rows fed to the estimator (pre-trimming)
    std::string warning;   // empty when clean

    // Replicate effects in replicate-index order (NaN slots removed); kept
    // for diagnostics and percentile intervals.
    std::vector<double> replicate_effects;
};

// Two-sided t-test p-value against the standard normal:
// 2 * (1 - Phi(|effect| / std_error)). For std_error = 0 the p-value is 1
// when the effect is 0 and 0 otherwise. Negative std_error throws
// std::domain_error.
double t_test_pvalue(double effect, double std_error);

// Bootstrap standard errors for the weighted DiD effect. Draws
// config.bootstrap_reps resamples with replacement -- rows i.i.d. when
// config.cluster_by is unset, whole clusters when set -- and re-runs the full
// chain (propensity fits, trimming, weighting) on each resample.
//
//   std_error = sample standard deviation of replicate effects
//   p_value   = 2 * (1 - Phi(|effect / std_error|))
//   ci95      = effect +/- 1.96 * std_error   (percentile CI behind
//               config.percentile_ci)
//
// Replicates that fail (empty cell after resampling, degenerate probit) are
// dropped and counted; more than 20% failures aborts with EstimationError
// "unstable bootstrap". Replicate RNG streams derive from (config.seed,
// replicate index), so results are bit-identical for a given seed whether
// replicates run serially or across threads.
InferenceResult bootstrap_inference(const Dataset& ds, const DesignConfig& config);

} // namespace didipw
