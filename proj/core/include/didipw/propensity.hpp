#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "didipw/dataset.hpp"
#include "didipw/probit.hpp"

namespace didipw {

// The four cell-probability models rho_{d,t}(X) = Pr(D=d, T=t | X), each a
// binary probit of the cell indicator on the covariates, fitted over the full
// sample, plus the raw treated-post share Pi.
struct PropensityFit {
    std::array<ProbitFit, 4> rho_fits; // indexed by cell_index(d,t)
    double pi_hat = 0.0;               // share of (D=1, T=1), from raw counts
    std::array<std::vector<double>, 4> rho; // predicted rho_{d,t}(x_i) per observation
    std::vector<std::uint8_t> d;
    std::vector<std::uint8_t> t;

    std::size_t size() const noexcept { return d.size(); }
};

struct TrimReport {
    double threshold = 0.0;
    std::size_t dropped_count = 0;
    std::array<std::size_t, 4> dropped_by_cell{};
    std::vector<std::size_t> kept_indices;
};

struct CellProbSummary {
    double min = 0, q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0, max = 0;
};

struct OverlapDiagnostics {
    double threshold = 0.0;
    std::array<CellProbSummary, 4> rho_summary; // over all observations, per cell model
    std::array<double, 4> trimmed_share_by_cell{}; // share of each cell's rows trimmed
    double treated_post_trimmed_share = 0.0;
    bool support_warning = false; // > 5% of treated-post rows trimmed
    // Row-wise sum of the four predicted probabilities. With covariates the
    // four binary probits need not sum to one; this range reports how far off
    // they drift (no renormalization is applied).
    double rho_sum_min = 0.0;
    double rho_sum_max = 0.0;
};

// Fits the four cell probits on the full sample and stores per-observation
// predictions. pi_hat is the raw sample share of treated-post rows. Probit
// failures propagate as EstimationError with the cell named.
PropensityFit estimate_cell_probabilities(const Dataset& ds);

// Drops observation i when any of the three denominator probabilities of the
// weighting formula -- rho_{1,0}(x_i), rho_{0,1}(x_i), rho_{0,0}(x_i) --
// falls below the threshold; under TrimRule::symmetric (default) treated-post
// rows are additionally dropped when rho_{1,1}(x_i) < threshold.
// Threshold outside [0, 0.5) throws ValidationError.
TrimReport trim(const Dataset& ds, const PropensityFit& fit, double threshold,
                TrimRule rule = TrimRule::symmetric);

// Descriptive overlap report at the configured trimming threshold; raises
// support_warning when more than 5% of treated-post rows would be trimmed.
OverlapDiagnostics overlap_diagnostics(const PropensityFit& fit, double threshold = 0.05,
                                       TrimRule rule = TrimRule::symmetric);

} // namespace didipw
