#include "didipw/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "didipw/normal.hpp"
#include "didipw/rng.hpp"
#include "kernel.hpp"

namespace didipw {

namespace {

constexpr double kCi95Multiplier = 1.96;
constexpr double kMaxFailedShare = 0.20;

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - w) + v[hi] * w;
}

void run_replicates(const detail::Kernel& kernel, const DesignConfig& config,
                    const detail::CellFits& warm, std::uint64_t seed, int begin, int end,
                    std::vector<double>& effects) {
    const std::size_t n_units = kernel.units.size();
    std::vector<std::int32_t> rows;
    rows.reserve(kernel.n + kernel.n / 4);
    for (int b = begin; b < end; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        rows.clear();
        for (std::size_t g = 0; g < n_units; ++g) {
            const auto& unit = kernel.units[rng.next_below(n_units)];
            rows.insert(rows.end(), unit.begin(), unit.end());
        }
        const detail::ReplicateEstimate est =
            detail::estimate_effect(kernel, config, &rows, &warm, nullptr);
        effects[static_cast<std::size_t>(b)] =
            est.ok ? est.effect : std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

double t_test_pvalue(double effect, double std_error) {
    if (std_error < 0.0 || !std::isfinite(std_error)) {
        throw std::domain_error("t_test_pvalue: std_error must be finite and >= 0");
    }
    if (std_error == 0.0) {
        return effect == 0.0 ? 1.0 : 0.0;
    }
    return 2.0 * (1.0 - std_normal_cdf(std::fabs(effect) / std_error));
}

InferenceResult bootstrap_inference(const Dataset& ds, const DesignConfig& config) {
    config.validate();
    const bool clustered = config.cluster_by.has_value();
    const detail::Kernel kernel = detail::Kernel::build(ds, clustered);

    // Point estimate and warm-start fits from the full sample.
    detail::EffectDiagnostics diag;
    const detail::ReplicateEstimate point =
        detail::estimate_effect(kernel, config, nullptr, nullptr, &diag);
    if (!point.ok) {
        throw EstimationError("bootstrap_inference: " + point.error);
    }

    const int reps = config.bootstrap_reps;
    std::vector<double> effects(static_cast<std::size_t>(reps),
                                std::numeric_limits<double>::quiet_NaN());
    const auto seed = static_cast<std::uint64_t>(config.seed);

    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = config.max_threads > 0 ? config.max_threads
                                           : static_cast<int>(hw > 0 ? hw : 1);
    n_threads = std::min(n_threads, reps);

    if (n_threads <= 1) {
        run_replicates(kernel, config, diag.fits, seed, 0, reps, effects);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        const int chunk = (reps + n_threads - 1) / n_threads;
        for (int tdx = 0; tdx < n_threads; ++tdx) {
            const int begin = tdx * chunk;
            const int end = std::min(reps, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                run_replicates(kernel, config, diag.fits, seed, begin, end, effects);
            });
        }
        for (auto& th : pool) th.join();
    }

    InferenceResult result;
    result.effect = point.effect;
    result.seed = config.seed;
    result.n_obs = ds.size();

    result.replicate_effects.reserve(effects.size());
    for (double e : effects) {
        if (std::isnan(e)) {
            ++result.failed_replications;
        } else {
            result.replicate_effects.push_back(e);
        }
    }
    result.replications_used = static_cast<int>(result.replicate_effects.size());

    if (static_cast<double>(result.failed_replications) >
        kMaxFailedShare * static_cast<double>(reps)) {
        throw EstimationError("unstable bootstrap: " + std::to_string(result.failed_replications) +
                              " of " + std::to_string(reps) + " replications failed");
    }

    if (result.replications_used >= 2) {
        KahanSum sum;
        for (double e : result.replicate_effects) sum.add(e);
        const double mean = sum.value() / result.replications_used;
        KahanSum sq;
        for (double e : result.replicate_effects) sq.add((e - mean) * (e - mean));
        result.std_error = std::sqrt(sq.value() / (result.replications_used - 1));
        double y_scale = 0.0;
        for (double y : kernel.y) y_scale = std::max(y_scale, std::fabs(y));
        if (result.std_error < detail::kEffectNoiseFloor * y_scale) {
            result.std_error = 0.0; // numerical zero, same floor as the effect
        }
    } else {
        result.std_error = 0.0;
        result.warning = "fewer than 2 usable replications; std_error set to 0";
    }

    result.p_value = t_test_pvalue(result.effect, result.std_error);
    if (result.std_error == 0.0 && result.effect != 0.0) {
        result.warning = "std_error is 0 with a nonzero effect; p-value pinned to 0";
    }

    if (config.percentile_ci && result.replications_used >= 2) {
        result.ci_low = percentile(result.replicate_effects, 0.025);
        result.ci_high = percentile(result.replicate_effects, 0.975);
    } else {
        result.ci_low = result.effect - kCi95Multiplier * result.std_error;
        result.ci_high = result.effect + kCi95Multiplier * result.std_error;
    }
    return result;
}

} // namespace didipw
