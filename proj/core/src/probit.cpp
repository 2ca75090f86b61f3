#include "didipw/probit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "didipw/common.hpp"
#include "didipw/dataset.hpp"
#include "didipw/normal.hpp"

namespace didipw {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// Per-observation pieces of the probit NLL at linear predictor eta:
// score s enters the gradient as -s*x, weight w = s*(eta+s) the Hessian.
inline void probit_terms(double eta, std::uint8_t yi, double& nll_term, double& s, double& w) {
    double cdf, pdf;
    std_normal_cdf_pdf(eta, cdf, pdf);
    const double p = std::clamp(cdf, kProbClamp, 1.0 - kProbClamp);
    if (yi) {
        nll_term = -std::log(p);
        s = pdf / p;
    } else {
        nll_term = -std::log(1.0 - p);
        s = -pdf / (1.0 - p);
    }
    w = s * (eta + s);
    if (w < 0.0) w = 0.0; // analytically nonnegative; guard rounding
}

struct RowRange {
    const std::int32_t* idx; // null = identity
    std::size_t n;
    std::size_t row(std::size_t k) const noexcept { return idx ? static_cast<std::size_t>(idx[k]) : k; }
};

// Complete separation: the fitted index strictly splits the classes, so the
// likelihood is unbounded and the MLE sits at infinity. The clamped
// likelihood plateaus there instead of diverging, which is why this is
// checked directly in addition to the coefficient-norm guard.
bool strictly_separated(const Matrix& X, const std::vector<std::uint8_t>& y, RowRange rows,
                        const std::vector<double>& beta) {
    const std::size_t p = X.cols();
    double min_pos = std::numeric_limits<double>::infinity();
    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rows.n; ++k) {
        const std::size_t i = rows.row(k);
        const double* xi = X.row(i);
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += xi[j] * beta[j];
        if (y[i]) {
            min_pos = std::min(min_pos, eta);
        } else {
            max_neg = std::max(max_neg, eta);
        }
    }
    return min_pos > max_neg;
}

double nll_value(const Matrix& X, const std::vector<std::uint8_t>& y, RowRange rows,
                 const std::vector<double>& beta) {
    const std::size_t p = X.cols();
    KahanSum total;
    for (std::size_t k = 0; k < rows.n; ++k) {
        const std::size_t i = rows.row(k);
        const double* xi = X.row(i);
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += xi[j] * beta[j];
        double term, s, w;
        probit_terms(eta, y[i], term, s, w);
        total.add(term);
    }
    return total.value();
}

// Full evaluation: NLL value, gradient, upper-triangular Hessian (packed into
// a dense symmetric p*p buffer).
double nll_full(const Matrix& X, const std::vector<std::uint8_t>& y, RowRange rows,
                const std::vector<double>& beta, std::vector<double>& grad,
                std::vector<double>& hess) {
    const std::size_t p = X.cols();
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    KahanSum total;
    for (std::size_t k = 0; k < rows.n; ++k) {
        const std::size_t i = rows.row(k);
        const double* xi = X.row(i);
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += xi[j] * beta[j];
        double term, s, w;
        probit_terms(eta, y[i], term, s, w);
        total.add(term);
        for (std::size_t j = 0; j < p; ++j) {
            grad[j] -= s * xi[j];
            const double wxj = w * xi[j];
            for (std::size_t l = j; l < p; ++l) {
                hess[j * p + l] += wxj * xi[l];
            }
        }
    }
    // Mirror the upper triangle.
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t l = j + 1; l < p; ++l) hess[l * p + j] = hess[j * p + l];
    return total.value();
}

} // namespace

ProbitNll probit_nll(const std::vector<double>& beta, const Matrix& X,
                     const std::vector<std::uint8_t>& y) {
    const std::size_t p = X.cols();
    if (beta.size() != p) {
        throw ValidationError("probit_nll: beta length does not match design matrix columns");
    }
    if (y.size() != X.rows()) {
        throw ValidationError("probit_nll: response length does not match design matrix rows");
    }
    for (std::uint8_t yi : y) {
        if (yi > 1) throw ValidationError("probit_nll: response must be 0/1");
    }
    ProbitNll out;
    out.gradient.assign(p, 0.0);
    std::vector<double> hess(p * p, 0.0);
    out.value = nll_full(X, y, RowRange{nullptr, X.rows()}, beta, out.gradient, hess);
    out.hessian = Matrix(p, p);
    out.hessian.data() = std::move(hess);
    return out;
}

ProbitFit fit_probit(const Matrix& X, const std::vector<std::uint8_t>& y, double tol,
                     int max_iter) {
    ProbitOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return fit_probit_opts(X, y, opts);
}

ProbitFit fit_probit_opts(const Matrix& X, const std::vector<std::uint8_t>& y,
                          const ProbitOptions& opts) {
    const std::size_t p = X.cols();
    RowRange rows{nullptr, X.rows()};
    if (opts.rows) {
        rows.idx = opts.rows->data();
        rows.n = opts.rows->size();
    }
    if (y.size() != X.rows()) {
        throw ValidationError("fit_probit: response length does not match design matrix rows");
    }
    if (rows.n < p) {
        throw ValidationError("fit_probit: need more observations than covariates");
    }

    std::size_t ones = 0;
    for (std::size_t k = 0; k < rows.n; ++k) ones += y[rows.row(k)];
    if (ones == 0 || ones == rows.n) {
        throw EstimationError("fit_probit: degenerate response (single class)");
    }

    std::vector<double> beta(p, 0.0);
    if (!opts.start.empty()) {
        if (opts.start.size() != p) {
            throw ValidationError("fit_probit: warm start length mismatch");
        }
        beta = opts.start;
    }

    std::vector<double> grad(p, 0.0);
    std::vector<double> hess(p * p, 0.0);
    double nll = nll_full(X, y, rows, beta, grad, hess);

    ProbitFit fit;
    fit.n_obs = rows.n;

    bool converged = false;
    int iter = 0;
    while (iter < opts.max_iter) {
        if (max_abs(grad) <= opts.tol) {
            converged = true;
            break;
        }
        std::vector<double> step = solve_spd(hess, p, grad);
        double scale = 1.0;
        std::vector<double> trial(p);
        double trial_nll = nll;
        bool accepted = false;
        // Slack of a few ulps: near the optimum the objective is flat at
        // double resolution and an exact decrease test deadlocks the search.
        const double slack = 1e-12 * (1.0 + std::fabs(nll));
        for (int halving = 0; halving < 40; ++halving) {
            for (std::size_t j = 0; j < p; ++j) trial[j] = beta[j] - scale * step[j];
            trial_nll = nll_value(X, y, rows, trial);
            if (trial_nll <= nll + slack) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break; // stalled; report non-convergence below
        beta.swap(trial);
        ++iter;
        if (max_abs(beta) > kSeparationNorm) {
            throw EstimationError("fit_probit: separation (coefficient norm diverged)");
        }
        nll = nll_full(X, y, rows, beta, grad, hess);
    }

    if (strictly_separated(X, y, rows, beta)) {
        throw EstimationError("fit_probit: separation (classes split by the fitted index)");
    }

    if (converged) {
        // One polishing Newton step; quadratic convergence puts the MLE at
        // machine precision once the tolerance is met.
        std::vector<double> step = solve_spd(hess, p, grad);
        std::vector<double> polished(p);
        for (std::size_t j = 0; j < p; ++j) polished[j] = beta[j] - step[j];
        std::vector<double> pgrad(p, 0.0);
        std::vector<double> phess(p * p, 0.0);
        const double pnll = nll_full(X, y, rows, polished, pgrad, phess);
        if (pnll <= nll * (1.0 + 1e-12) + 1e-300) {
            beta.swap(polished);
            grad.swap(pgrad);
            ++iter;
        }
    }

    fit.coefficients = std::move(beta);
    fit.converged = converged;
    fit.iterations = iter;
    fit.final_gradient_norm = max_abs(grad);
    return fit;
}

double predict_probit(const ProbitFit& fit, const std::vector<double>& x) {
    if (x.size() + 1 != fit.coefficients.size()) {
        throw ValidationError("predict_probit: covariate length does not match fit");
    }
    double eta = fit.coefficients[0];
    for (std::size_t j = 0; j < x.size(); ++j) eta += fit.coefficients[j + 1] * x[j];
    return std::clamp(std_normal_cdf(eta), kProbClamp, 1.0 - kProbClamp);
}

Matrix build_design_matrix(const Dataset& ds) {
    const std::size_t n = ds.size();
    const std::size_t p = ds.covariate_count() + 1;
    Matrix X(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = X.row(i);
        row[0] = 1.0;
        const auto& cov = ds.observations[i].covariates;
        for (std::size_t j = 0; j < cov.size(); ++j) row[j + 1] = cov[j];
    }
    return X;
}

} // namespace didipw
