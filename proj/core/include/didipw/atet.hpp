#pragma once

#include <array>

#include "didipw/dataset.hpp"
#include "didipw/propensity.hpp"

namespace didipw {

struct CellWeightSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t count = 0;
};

struct AtetEstimate {
    double effect = 0.0;       // outcome units
    std::size_t n_used = 0;    // post-trimming
    std::size_t n_total = 0;
    TrimReport trim_report;
    std::array<CellWeightSummary, 4> weights_summary; // applied weights per cell
};

// The observation's multiplier in the weighting identity, by cell:
//   treated-post  +1 / Pi
//   treated-pre   -rho11(x) / (rho10(x) * Pi)
//   control-post  -rho11(x) / (rho01(x) * Pi)
//   control-pre   +rho11(x) / (rho00(x) * Pi)
// so the four cell contributions carry the (+, -, -, +) contrast pattern.
// A zero denominator (impossible after trimming with threshold > 0) throws
// EstimationError.
double ipw_cell_weight(int d, int t, double rho11, double rho_own, double pi);

// Weight of observation i under a fitted propensity model.
double ipw_weight(const PropensityFit& fit, std::size_t i);

// The semi-parametric ATET: fits propensities on the full sample, trims at
// config.trim_threshold, and averages weight * outcome over the kept rows.
// Pi and the rho predictions come from the full-sample fit (no refit after
// trimming unless config.refit_after_trim is set).
// Throws EstimationError "no effective treated sample" when trimming removes
// every treated-post row.
AtetEstimate estimate_atet(const Dataset& ds, const DesignConfig& config);

// Plain difference-in-differences of cell means,
// (Ybar11 - Ybar10) - (Ybar01 - Ybar00). Oracle/benchmark for the weighted
// estimator: the two coincide under intercept-only propensities.
double simple_did(const Dataset& ds);

} // namespace didipw
