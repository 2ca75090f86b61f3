#include "didipw/propensity.hpp"

#include <algorithm>
#include <cmath>

#include "kernel.hpp"

namespace didipw {

namespace {

// Type-7 quantile (linear interpolation between order statistics).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

} // namespace

PropensityFit estimate_cell_probabilities(const Dataset& ds) {
    const detail::Kernel kernel = detail::Kernel::build(ds, false);

    PropensityFit fit;
    const detail::CellFits fits = detail::fit_cells(kernel, nullptr, nullptr);
    fit.rho_fits = fits.fits;
    detail::predict_cells(kernel, fits, nullptr, fit.rho);
    fit.d = kernel.d;
    fit.t = kernel.t;
    fit.pi_hat = static_cast<double>(ds.cell_counts[kCellTreatedPost]) /
                 static_cast<double>(ds.size());
    return fit;
}

TrimReport trim(const Dataset& ds, const PropensityFit& fit, double threshold, TrimRule rule) {
    if (!(threshold >= 0.0) || !(threshold < 0.5)) {
        throw ValidationError("trim: threshold must lie in [0, 0.5)");
    }
    if (fit.size() != ds.size()) {
        throw ValidationError("trim: fit does not cover this dataset");
    }

    std::vector<std::uint8_t> cells(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) cells[i] = ds.observations[i].cell();

    const detail::TrimMask mask = detail::trim_entries(fit.rho, cells, threshold, rule);

    TrimReport report;
    report.threshold = threshold;
    report.dropped_by_cell = mask.dropped_by_cell;
    report.dropped_count = ds.size() - mask.kept_count;
    report.kept_indices.reserve(mask.kept_count);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (mask.keep[i]) report.kept_indices.push_back(i);
    }
    return report;
}

OverlapDiagnostics overlap_diagnostics(const PropensityFit& fit, double threshold,
                                       TrimRule rule) {
    if (!(threshold >= 0.0) || !(threshold < 0.5)) {
        throw ValidationError("overlap_diagnostics: threshold must lie in [0, 0.5)");
    }
    const std::size_t n = fit.size();
    OverlapDiagnostics diag;
    diag.threshold = threshold;

    for (std::size_t c = 0; c < 4; ++c) {
        std::vector<double> sorted = fit.rho[c];
        std::sort(sorted.begin(), sorted.end());
        CellProbSummary& s = diag.rho_summary[c];
        s.min = sorted.front();
        s.q05 = quantile_sorted(sorted, 0.05);
        s.q25 = quantile_sorted(sorted, 0.25);
        s.median = quantile_sorted(sorted, 0.50);
        s.q75 = quantile_sorted(sorted, 0.75);
        s.q95 = quantile_sorted(sorted, 0.95);
        s.max = sorted.back();
    }

    std::vector<std::uint8_t> cells(n);
    std::array<std::size_t, 4> cell_counts{};
    for (std::size_t i = 0; i < n; ++i) {
        cells[i] = static_cast<std::uint8_t>(cell_index(fit.d[i], fit.t[i]));
        ++cell_counts[cells[i]];
    }
    const detail::TrimMask mask = detail::trim_entries(fit.rho, cells, threshold, rule);
    for (std::size_t c = 0; c < 4; ++c) {
        diag.trimmed_share_by_cell[c] =
            cell_counts[c] == 0 ? 0.0
                                : static_cast<double>(mask.dropped_by_cell[c]) /
                                      static_cast<double>(cell_counts[c]);
    }
    diag.treated_post_trimmed_share = diag.trimmed_share_by_cell[kCellTreatedPost];
    diag.support_warning = diag.treated_post_trimmed_share > 0.05;

    double sum_min = 4.0, sum_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = fit.rho[0][i] + fit.rho[1][i] + fit.rho[2][i] + fit.rho[3][i];
        sum_min = std::min(sum_min, s);
        sum_max = std::max(sum_max, s);
    }
    diag.rho_sum_min = sum_min;
    diag.rho_sum_max = sum_max;
    return diag;
}

} // namespace didipw
