#include "didipw/dgp.hpp"

#include <cmath>
#include <string>

#include "didipw/atet.hpp"
#include "didipw/inference.hpp"
#include "didipw/normal.hpp"
#include "didipw/rng.hpp"

namespace didipw {

namespace {

// Stage slopes: group membership loads on 0.7*s*u, the period-within-group
// tilt on 0.4*s*u with opposite signs across groups.
constexpr double kGroupSlope = 0.7;
constexpr double kPeriodSlope = 0.4;

double link_probability(MembershipLink link, double eta) {
    if (link == MembershipLink::probit) {
        return std_normal_cdf(eta);
    }
    return 1.0 / (1.0 + std::exp(-eta));
}

std::vector<std::string> covariate_names(int k) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) names.push_back("x" + std::to_string(j));
    return names;
}

Dataset generate_once(const SimConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    const int k = cfg.covariate_count;
    const double index_scale = k > 0 ? 1.0 / std::sqrt(static_cast<double>(k)) : 0.0;

    std::vector<Record> rows;
    rows.reserve(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        Record r;
        r.covariates.resize(static_cast<std::size_t>(k));
        double xsum = 0.0;
        for (int j = 0; j < k; ++j) {
            const double x = rng.next_normal();
            r.covariates[static_cast<std::size_t>(j)] = x;
            xsum += x;
        }
        const double u = xsum * index_scale;

        const double p_group =
            link_probability(cfg.link, kGroupSlope * cfg.selection_strength * u);
        const int d = rng.next_unit() < p_group ? 1 : 0;
        const double p_post = link_probability(
            cfg.link, (2 * d - 1) * kPeriodSlope * cfg.selection_strength * u);
        const int t = rng.next_unit() < p_post ? 1 : 0;

        const double eps = rng.next_normal();
        double y = cfg.group_effect * d + cfg.time_effect * t + cfg.true_atet * (d * t) +
                   cfg.outcome_beta * xsum + cfg.trend_violation * (d * t) +
                   cfg.anticipation * (d * (1 - t)) + cfg.noise_sd * eps;

        r.outcome = y;
        r.treated = static_cast<double>(d);
        r.post = static_cast<double>(t);
        r.unit_id = std::to_string(i);
        if (cfg.school_count > 0) {
            r.cluster_id = "s" + std::to_string(i % cfg.school_count) + "_y" + std::to_string(t);
        } else {
            r.cluster_id = r.unit_id;
        }
        rows.push_back(std::move(r));
    }

    DesignConfig dc;
    dc.outcome_name = "y";
    dc.covariate_names = covariate_names(k);
    return build_dataset(rows, dc);
}

} // namespace

void SimConfig::validate() const {
    if (n < 40) throw ValidationError("SimConfig: n must be >= 40");
    if (!(noise_sd > 0.0)) throw ValidationError("SimConfig: noise_sd must be > 0");
    if (covariate_count < 0) throw ValidationError("SimConfig: covariate_count must be >= 0");
}

Generated generate(const SimConfig& cfg) {
    cfg.validate();
    const auto base = static_cast<std::uint64_t>(cfg.seed);
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            Generated g{generate_once(cfg, derive_seed(base, static_cast<std::uint64_t>(attempt))),
                        cfg.true_atet};
            return g;
        } catch (const DesignError&) {
            // empty cell this draw; retry with the next derived stream
        }
    }
    throw DesignError("generate: empty (d,t) cell after 10 attempts");
}

MonteCarloSummary monte_carlo(const SimConfig& cfg, int replications,
                              const DesignConfig& estimation) {
    cfg.validate();
    if (replications < 50) {
        throw ValidationError("monte_carlo: replications must be >= 50");
    }

    MonteCarloSummary summary;
    summary.replications = replications;
    summary.true_atet = cfg.true_atet;

    KahanSum est_sum, sq_err_sum, se_sum;
    int covered = 0;
    int rejected = 0;

    const auto base = static_cast<std::uint64_t>(cfg.seed);
    for (int r = 0; r < replications; ++r) {
        SimConfig draw_cfg = cfg;
        draw_cfg.seed = static_cast<std::int64_t>(derive_seed(base, 2 * static_cast<std::uint64_t>(r)));
        const Generated g = generate(draw_cfg);

        DesignConfig dc = estimation;
        dc.outcome_name = "y";
        dc.covariate_names = g.dataset.covariate_names;
        dc.seed = static_cast<std::int64_t>(derive_seed(base, 2 * static_cast<std::uint64_t>(r) + 1));

        try {
            const InferenceResult inf = bootstrap_inference(g.dataset, dc);
            est_sum.add(inf.effect);
            const double err = inf.effect - g.true_atet;
            sq_err_sum.add(err * err);
            se_sum.add(inf.std_error);
            if (inf.ci_low <= g.true_atet && g.true_atet <= inf.ci_high) ++covered;
            if (inf.p_value < 0.05) ++rejected;
        } catch (const std::exception& e) {
            throw EstimationError("monte_carlo replicate " + std::to_string(r) + ": " + e.what());
        }
    }

    const auto denom = static_cast<double>(replications);
    summary.mean_estimate = est_sum.value() / denom;
    summary.mean_bias = summary.mean_estimate - cfg.true_atet;
    summary.rmse = std::sqrt(sq_err_sum.value() / denom);
    summary.coverage95 = covered / denom;
    summary.rejection_rate_5pct = rejected / denom;
    summary.mean_std_error = se_sum.value() / denom;
    return summary;
}

} // namespace didipw
