#include "didipw/dataset.hpp"

#include <cmath>
#include <utility>

namespace didipw {

namespace {

bool is_binary(double v) {
    return v == 0.0 || v == 1.0;
}

void check_cells_nonempty(const std::array<std::size_t, 4>& counts) {
    std::string empty;
    for (std::size_t c = 0; c < 4; ++c) {
        if (counts[c] == 0) {
            if (!empty.empty()) empty += ", ";
            empty += cell_name(c);
        }
    }
    if (!empty.empty()) {
        throw DesignError("design requires all four (d,t) cells non-empty; empty cell " + empty);
    }
}

} // namespace

void DesignConfig::validate() const {
    if (!(trim_threshold >= 0.0) || !(trim_threshold < 0.5)) {
        throw ValidationError("trim_threshold must lie in [0, 0.5)");
    }
    if (bootstrap_reps < 1) {
        throw ValidationError("bootstrap_reps must be >= 1");
    }
}

Dataset build_dataset(const std::vector<Record>& rows, const DesignConfig& config) {
    config.validate();
    const std::size_t k = config.covariate_names.size();

    std::vector<Observation> obs;
    obs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Record& r = rows[i];
        const std::string where = "record " + std::to_string(i);
        if (!r.outcome) throw ValidationError(where + ": missing outcome");
        if (!r.treated) throw ValidationError(where + ": missing treatment indicator D");
        if (!r.post) throw ValidationError(where + ": missing period indicator T");
        if (!std::isfinite(*r.outcome)) throw ValidationError(where + ": non-finite outcome");
        if (!is_binary(*r.treated)) {
            throw ValidationError(where + ": D must be 0 or 1, got " + std::to_string(*r.treated));
        }
        if (!is_binary(*r.post)) {
            throw ValidationError(where + ": T must be 0 or 1, got " + std::to_string(*r.post));
        }
        if (r.covariates.size() != k) {
            throw ValidationError(where + ": expected " + std::to_string(k) + " covariates, got " +
                                  std::to_string(r.covariates.size()));
        }
        Observation o;
        o.outcome = *r.outcome;
        o.treated = static_cast<std::uint8_t>(*r.treated);
        o.post = static_cast<std::uint8_t>(*r.post);
        o.covariates.reserve(k);
        for (std::size_t j = 0; j < k; ++j) {
            if (!r.covariates[j] || !std::isfinite(*r.covariates[j])) {
                throw ValidationError(where + ": missing covariate '" +
                                      config.covariate_names[j] + "'");
            }
            o.covariates.push_back(*r.covariates[j]);
        }
        o.cluster_id = r.cluster_id;
        o.unit_id = r.unit_id.empty() ? std::to_string(i) : r.unit_id;
        obs.push_back(std::move(o));
    }

    return rebuild_dataset(std::move(obs), config.covariate_names);
}

Dataset rebuild_dataset(std::vector<Observation> observations,
                        std::vector<std::string> covariate_names) {
    Dataset ds;
    ds.covariate_names = std::move(covariate_names);
    ds.cell_counts = {0, 0, 0, 0};
    const std::size_t k = ds.covariate_names.size();
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& o = observations[i];
        if (o.treated > 1 || o.post > 1) {
            throw ValidationError("observation " + std::to_string(i) + ": D/T out of {0,1}");
        }
        if (o.covariates.size() != k) {
            throw ValidationError("observation " + std::to_string(i) +
                                  ": covariate length mismatch");
        }
        ds.cell_counts[o.cell()] += 1;
    }
    check_cells_nonempty(ds.cell_counts);
    ds.observations = std::move(observations);
    return ds;
}

std::array<double, 4> cell_means(const Dataset& ds) {
    std::array<KahanSum, 4> sums;
    for (const Observation& o : ds.observations) {
        sums[o.cell()].add(o.outcome);
    }
    std::array<double, 4> means{};
    for (std::size_t c = 0; c < 4; ++c) {
        means[c] = sums[c].value() / static_cast<double>(ds.cell_counts[c]);
    }
    return means;
}

} // namespace didipw
