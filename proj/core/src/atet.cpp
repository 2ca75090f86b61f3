#include "didipw/atet.hpp"

#include <cmath>
#include <limits>

#include "kernel.hpp"

namespace didipw {

double ipw_cell_weight(int d, int t, double rho11, double rho_own, double pi) {
    if (pi == 0.0) throw EstimationError("ipw_weight: zero treated-post share");
    if (d == 1 && t == 1) {
        return 1.0 / pi;
    }
    if (rho_own == 0.0) {
        throw EstimationError("ipw_weight: zero denominator probability in cell " +
                              cell_name(cell_index(d, t)));
    }
    const double magnitude = rho11 / (rho_own * pi);
    // Contrast signs: treated-pre and control-post enter negatively,
    // control-pre positively.
    return (d == 1 || t == 1) ? -magnitude : magnitude;
}

double ipw_weight(const PropensityFit& fit, std::size_t i) {
    if (i >= fit.size()) {
        throw ValidationError("ipw_weight: observation index out of range");
    }
    const std::size_t c = cell_index(fit.d[i], fit.t[i]);
    return ipw_cell_weight(fit.d[i], fit.t[i], fit.rho[kCellTreatedPost][i], fit.rho[c][i],
                           fit.pi_hat);
}

AtetEstimate estimate_atet(const Dataset& ds, const DesignConfig& config) {
    config.validate();
    const detail::Kernel kernel = detail::Kernel::build(ds, false);

    detail::EffectDiagnostics diag;
    const detail::ReplicateEstimate est =
        detail::estimate_effect(kernel, config, nullptr, nullptr, &diag);
    if (!est.ok) {
        throw EstimationError("estimate_atet: " + est.error);
    }

    AtetEstimate out;
    out.effect = est.effect;
    out.n_used = est.n_kept;
    out.n_total = ds.size();

    out.trim_report.threshold = config.trim_threshold;
    out.trim_report.dropped_by_cell = diag.mask.dropped_by_cell;
    out.trim_report.dropped_count = ds.size() - diag.mask.kept_count;
    out.trim_report.kept_indices.reserve(diag.mask.kept_count);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (diag.mask.keep[i]) out.trim_report.kept_indices.push_back(i);
    }

    for (auto& s : out.weights_summary) {
        s.min = std::numeric_limits<double>::infinity();
        s.max = -std::numeric_limits<double>::infinity();
    }
    std::array<KahanSum, 4> sums;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!diag.mask.keep[i]) continue;
        const std::size_t c = kernel.cell_of[i];
        CellWeightSummary& s = out.weights_summary[c];
        const double w = diag.weights[i];
        s.min = std::min(s.min, w);
        s.max = std::max(s.max, w);
        sums[c].add(w);
        ++s.count;
    }
    for (std::size_t c = 0; c < 4; ++c) {
        CellWeightSummary& s = out.weights_summary[c];
        if (s.count == 0) {
            s.min = s.max = s.mean = 0.0;
        } else {
            s.mean = sums[c].value() / static_cast<double>(s.count);
        }
    }
    return out;
}

double simple_did(const Dataset& ds) {
    const std::array<double, 4> means = cell_means(ds);
    return (means[kCellTreatedPost] - means[kCellTreatedPre]) -
           (means[kCellControlPost] - means[kCellControlPre]);
}

} // namespace didipw
