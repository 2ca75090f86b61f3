#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "didipw/atet.hpp"
#include "didipw/common.hpp"
#include "didipw/normal.hpp"

namespace didipw::detail {

Kernel Kernel::build(const Dataset& ds, bool cluster) {
    Kernel k;
    k.n = ds.size();
    k.p = ds.covariate_count() + 1;
    k.X = build_design_matrix(ds);
    k.y.resize(k.n);
    k.d.resize(k.n);
    k.t.resize(k.n);
    k.cell_of.resize(k.n);
    for (auto& flag : k.cell_flag) flag.assign(k.n, 0);

    std::unordered_map<std::string, std::size_t> unit_of_cluster;
    for (std::size_t i = 0; i < k.n; ++i) {
        const Observation& o = ds.observations[i];
        k.y[i] = o.outcome;
        k.d[i] = o.treated;
        k.t[i] = o.post;
        const auto cell = o.cell();
        k.cell_of[i] = static_cast<std::uint8_t>(cell);
        k.cell_flag[cell][i] = 1;

        if (cluster) {
            auto [it, inserted] = unit_of_cluster.try_emplace(o.cluster_id, k.units.size());
            if (inserted) k.units.emplace_back();
            k.units[it->second].push_back(static_cast<std::int32_t>(i));
        } else {
            k.units.push_back({static_cast<std::int32_t>(i)});
        }
    }
    return k;
}

CellFits fit_cells(const Kernel& kernel, const std::vector<std::int32_t>* rows,
                   const CellFits* warm_start, double tol, int max_iter) {
    CellFits out;
    for (std::size_t c = 0; c < 4; ++c) {
        ProbitOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        opts.rows = rows;
        if (warm_start) opts.start = warm_start->fits[c].coefficients;
        try {
            out.fits[c] = fit_probit_opts(kernel.X, kernel.cell_flag[c], opts);
        } catch (const std::exception& e) {
            throw EstimationError("cell " + cell_name(c) + " probit: " + e.what());
        }
    }
    return out;
}

void predict_cells(const Kernel& kernel, const CellFits& fits,
                   const std::vector<std::int32_t>* rows,
                   std::array<std::vector<double>, 4>& rho) {
    const std::size_t m = rows ? rows->size() : kernel.n;
    const std::size_t p = kernel.p;
    for (std::size_t c = 0; c < 4; ++c) {
        rho[c].resize(m);
        const std::vector<double>& beta = fits.fits[c].coefficients;
        for (std::size_t kdx = 0; kdx < m; ++kdx) {
            const std::size_t i = rows ? static_cast<std::size_t>((*rows)[kdx]) : kdx;
            const double* xi = kernel.X.row(i);
            double eta = 0.0;
            for (std::size_t j = 0; j < p; ++j) eta += xi[j] * beta[j];
            rho[c][kdx] = std::clamp(std_normal_cdf(eta), kProbClamp, 1.0 - kProbClamp);
        }
    }
}

TrimMask trim_entries(const std::array<std::vector<double>, 4>& rho,
                      const std::vector<std::uint8_t>& cells, double threshold, TrimRule rule) {
    const std::size_t m = cells.size();
    TrimMask mask;
    mask.keep.assign(m, 1);
    mask.kept_count = m;
    for (std::size_t k = 0; k < m; ++k) {
        bool drop = rho[kCellTreatedPre][k] < threshold ||
                    rho[kCellControlPost][k] < threshold ||
                    rho[kCellControlPre][k] < threshold;
        if (rule == TrimRule::symmetric && cells[k] == kCellTreatedPost) {
            drop = drop || rho[kCellTreatedPost][k] < threshold;
        }
        if (drop) {
            mask.keep[k] = 0;
            --mask.kept_count;
            ++mask.dropped_by_cell[cells[k]];
        }
    }
    return mask;
}

ReplicateEstimate estimate_effect(const Kernel& kernel, const DesignConfig& config,
                                  const std::vector<std::int32_t>* rows,
                                  const CellFits* warm_start, EffectDiagnostics* diag) {
    ReplicateEstimate result;
    const std::size_t m = rows ? rows->size() : kernel.n;

    std::vector<std::uint8_t> cells(m);
    std::array<std::size_t, 4> counts{};
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = rows ? static_cast<std::size_t>((*rows)[k]) : k;
        cells[k] = kernel.cell_of[i];
        ++counts[cells[k]];
    }
    for (std::size_t c = 0; c < 4; ++c) {
        if (counts[c] == 0) {
            result.error = "empty cell " + cell_name(c) + " in sample";
            return result;
        }
    }

    const double pi_hat =
        static_cast<double>(counts[kCellTreatedPost]) / static_cast<double>(m);

    CellFits fits;
    try {
        fits = fit_cells(kernel, rows, warm_start);
    } catch (const std::exception& e) {
        result.error = e.what();
        return result;
    }

    std::array<std::vector<double>, 4> rho;
    predict_cells(kernel, fits, rows, rho);

    TrimMask mask = trim_entries(rho, cells, config.trim_threshold, config.trim_rule);
    if (counts[kCellTreatedPost] == mask.dropped_by_cell[kCellTreatedPost]) {
        result.error = "no effective treated sample (all treated-post rows trimmed)";
        return result;
    }
    if (mask.kept_count == 0) {
        result.error = "no observations left after trimming";
        return result;
    }

    if (config.refit_after_trim) {
        // Refit the cell models on the kept rows; Pi stays the full-sample
        // share by design.
        std::vector<std::int32_t> kept_rows;
        kept_rows.reserve(mask.kept_count);
        for (std::size_t k = 0; k < m; ++k) {
            if (!mask.keep[k]) continue;
            kept_rows.push_back(rows ? (*rows)[k] : static_cast<std::int32_t>(k));
        }
        try {
            CellFits refits = fit_cells(kernel, &kept_rows, &fits);
            fits = refits;
        } catch (const std::exception& e) {
            result.error = e.what();
            return result;
        }
        predict_cells(kernel, fits, rows, rho);
    }

    std::vector<double> weights;
    if (diag) weights.assign(m, 0.0);

    double y_scale = 0.0;
    double effect;
    if (!config.hajek_normalization) {
        KahanSum acc;
        for (std::size_t k = 0; k < m; ++k) {
            if (!mask.keep[k]) continue;
            const std::size_t i = rows ? static_cast<std::size_t>((*rows)[k]) : k;
            const std::size_t c = cells[k];
            const double w = ipw_cell_weight(c >= 2 ? 1 : 0, c & 1, rho[kCellTreatedPost][k],
                                             rho[c][k], pi_hat);
            acc.add(w * kernel.y[i]);
            y_scale = std::max(y_scale, std::fabs(kernel.y[i]));
            if (diag) weights[k] = w;
        }
        effect = acc.value() / static_cast<double>(mask.kept_count);
    } else {
        // Hajek variant: weighted mean of the outcome within each cell using
        // |w| as the weight, combined with the (+,-,-,+) contrast signs.
        std::array<KahanSum, 4> wy;
        std::array<KahanSum, 4> wsum;
        for (std::size_t k = 0; k < m; ++k) {
            if (!mask.keep[k]) continue;
            const std::size_t i = rows ? static_cast<std::size_t>((*rows)[k]) : k;
            const std::size_t c = cells[k];
            const double w = ipw_cell_weight(c >= 2 ? 1 : 0, c & 1, rho[kCellTreatedPost][k],
                                             rho[c][k], pi_hat);
            const double aw = std::fabs(w);
            wy[c].add(aw * kernel.y[i]);
            wsum[c].add(aw);
            y_scale = std::max(y_scale, std::fabs(kernel.y[i]));
            if (diag) weights[k] = w;
        }
        const auto cell_mean = [&](std::size_t c) { return wy[c].value() / wsum[c].value(); };
        effect = (cell_mean(kCellTreatedPost) - cell_mean(kCellTreatedPre)) -
                 (cell_mean(kCellControlPost) - cell_mean(kCellControlPre));
    }

    if (!std::isfinite(effect)) {
        result.error = "non-finite effect";
        return result;
    }
    // A contrast below machine noise relative to the outcome scale collapses
    // to exact zero, so degenerate designs (constant outcome) report a zero
    // effect instead of leftover rounding from the weight telescoping.
    if (std::fabs(effect) < kEffectNoiseFloor * y_scale) {
        effect = 0.0;
    }

    if (diag) {
        diag->fits = fits;
        diag->rho = rho;
        diag->pi_hat = pi_hat;
        diag->mask = mask;
        diag->weights = std::move(weights);
    }

    result.ok = true;
    result.effect = effect;
    result.n_kept = mask.kept_count;
    return result;
}

} // namespace didipw::detail
