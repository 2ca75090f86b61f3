#pragma once

#include <cstdint>

#include "didipw/dataset.hpp"

namespace didipw {

enum class MembershipLink {
    probit, // treated-post membership through the normal CDF (baseline)
    logit,  // logistic link; cell log-odds linear in the index
};

// Synthetic repeated cross-section with a known treatment effect.
//
// Covariates are i.i.d. standard normal. Cell membership works off the
// scalar index u = sum(x)/sqrt(k) in two stages, both through the link L:
// group membership D ~ Bernoulli(L(0.7*s*u)) and period membership
// T | D=d ~ Bernoulli(L((2d-1)*0.4*s*u)) with s = selection_strength. The
// opposite period tilts across groups shift cell composition differentially,
// so the plain difference of cell means is confounded while the weighted
// estimator stays centered. With the logit link the four cell log-odds are
// exactly linear in the index; the probit link is the baseline the
// estimator's cell models track.
//
// Outcomes are
//   Y = group_effect*D + time_effect*T + true_atet*D*T + beta'X
//       + trend_violation*D*T + anticipation*D*(1-T) + noise_sd*eps
// with every covariate carrying coefficient outcome_beta. trend_violation
// breaks the common-trend assumption (0 = parallel trends); anticipation
// shifts treated pre-period outcomes (0 = no anticipatory effect).
struct SimConfig {
    int n = 4000;
    double true_atet = 1.0;
    double group_effect = 1.0;
    double time_effect = 0.5;
    int covariate_count = 3;
    double selection_strength = 0.5;
    double noise_sd = 1.0;
    double trend_violation = 0.0;
    double anticipation = 0.0;
    std::int64_t seed = 0;

    MembershipLink link = MembershipLink::probit;
    double outcome_beta = 0.3;
    // 0 = every row its own cluster; otherwise rows are spread over this many
    // schools and cluster_id becomes the school-year cell.
    int school_count = 0;

    void validate() const; // n >= 40, noise_sd > 0, covariate_count >= 0
};

struct Generated {
    Dataset dataset;
    double true_atet = 0.0;
};

// Same seed => bit-identical dataset. If a (d,t) cell comes out empty the
// draw is retried up to 10 times before DesignError.
Generated generate(const SimConfig& cfg);

struct MonteCarloSummary {
    int replications = 0;
    double true_atet = 0.0;
    double mean_estimate = 0.0;
    double mean_bias = 0.0;
    double rmse = 0.0;
    double coverage95 = 0.0;        // share of replications whose 95% CI covers tau
    double rejection_rate_5pct = 0.0; // share with p < 0.05
    double mean_std_error = 0.0;
};

// Repeats generate -> estimate_atet -> bootstrap_inference. `estimation`
// supplies trimming/bootstrap settings; per-replication seeds derive from
// cfg.seed. replications must be >= 50. Estimation failures propagate with
// the replicate index attached.
MonteCarloSummary monte_carlo(const SimConfig& cfg, int replications,
                              const DesignConfig& estimation = DesignConfig{});

} // namespace didipw
