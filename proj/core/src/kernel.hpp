#pragma once

// Shared estimation internals. Everything that the public chain
// (estimate_cell_probabilities -> trim -> estimate_atet) and the bootstrap
// replicates both need runs through this one kernel, so resampled estimates
// follow exactly the semantics of the full-sample path.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "didipw/dataset.hpp"
#include "didipw/linalg.hpp"
#include "didipw/probit.hpp"

namespace didipw::detail {

// Effects and bootstrap standard errors smaller than this multiple of the
// outcome scale are numerical zeros (weight telescoping leaves ~1e-15
// residue on degenerate data).
inline constexpr double kEffectNoiseFloor = 4096.0 * 2.220446049250313e-16;

struct Kernel {
    std::size_t n = 0;
    std::size_t p = 0; // covariates + intercept
    Matrix X;
    std::vector<double> y;
    std::vector<std::uint8_t> d;
    std::vector<std::uint8_t> t;
    std::vector<std::uint8_t> cell_of;                  // cell_index(d,t) per row
    std::array<std::vector<std::uint8_t>, 4> cell_flag; // indicator per cell

    // Rows per resampling unit. When cluster_by is unset every row is its own
    // unit (i.i.d. bootstrap); when set, units are the distinct cluster_ids in
    // order of first appearance.
    std::vector<std::vector<std::int32_t>> units;

    static Kernel build(const Dataset& ds, bool cluster);
};

struct CellFits {
    std::array<ProbitFit, 4> fits;
};

// Fits the four cell-indicator probits over `rows` (null = all rows).
// Throws EstimationError naming the failing cell.
CellFits fit_cells(const Kernel& kernel, const std::vector<std::int32_t>* rows,
                   const CellFits* warm_start, double tol = 1e-8, int max_iter = 100);

// Predicted (clamped) cell probabilities for each entry of `rows`
// (null = all rows). rho[c][k] corresponds to rows[k].
void predict_cells(const Kernel& kernel, const CellFits& fits,
                   const std::vector<std::int32_t>* rows,
                   std::array<std::vector<double>, 4>& rho);

struct TrimMask {
    std::vector<std::uint8_t> keep;
    std::size_t kept_count = 0;
    std::array<std::size_t, 4> dropped_by_cell{};
};

// Applies the trimming rule to per-entry probabilities. cells[k] is the cell
// of entry k.
TrimMask trim_entries(const std::array<std::vector<double>, 4>& rho,
                      const std::vector<std::uint8_t>& cells, double threshold, TrimRule rule);

struct EffectDiagnostics {
    CellFits fits;
    std::array<std::vector<double>, 4> rho;
    double pi_hat = 0.0;
    TrimMask mask;
    std::vector<double> weights; // per kept entry slot; 0 for dropped entries
};

struct ReplicateEstimate {
    bool ok = false;
    std::string error;
    double effect = 0.0;
    std::size_t n_kept = 0;
};

// The full estimation chain over a row multiset: four probit fits, trim,
// share Pi from the resample, weighted mean over kept entries. Failure
// (empty cell, degenerate probit, everything trimmed) comes back in the
// result instead of throwing so bootstrap replicates can be counted.
ReplicateEstimate estimate_effect(const Kernel& kernel, const DesignConfig& config,
                                  const std::vector<std::int32_t>* rows,
                                  const CellFits* warm_start, EffectDiagnostics* diag);

} // namespace didipw::detail
