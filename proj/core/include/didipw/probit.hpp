#pragma once

#include <cstdint>
#include <vector>

#include "didipw/linalg.hpp"

namespace didipw {

struct Dataset;

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the
// likelihood and in predictions, keeping logs and weights finite under
// extreme linear predictors.
inline constexpr double kProbClamp = 1e-12;

// Coefficient norm beyond which the fit is treated as quasi-complete
// separation and aborted.
inline constexpr double kSeparationNorm = 1e4;

struct ProbitFit {
    std::vector<double> coefficients; // intercept first
    bool converged = false;
    int iterations = 0;
    double final_gradient_norm = 0.0;
    std::size_t n_obs = 0;
};

struct ProbitNll {
    double value = 0.0;
    std::vector<double> gradient;
    Matrix hessian;
};

struct ProbitOptions {
    double tol = 1e-8;
    int max_iter = 100;
    // Optional warm start (intercept first). Empty = start from zero, the
    // documented default.
    std::vector<double> start;
    // Optional row subset of X/y; empty = all rows. Enables resampled fits
    // without copying the design matrix.
    const std::vector<std::int32_t>* rows = nullptr;
};

// Negative log-likelihood of the probit model with analytic gradient and
// Hessian. X must include the intercept column; y in {0,1}^n.
//   value   = -sum_i [ y_i log Phi(x_i'b) + (1-y_i) log Phi(-x_i'b) ]
// The Hessian is positive semi-definite.
ProbitNll probit_nll(const std::vector<double>& beta, const Matrix& X,
                     const std::vector<std::uint8_t>& y);

// Newton-Raphson maximum likelihood from beta = 0 with step-halving when the
// objective fails to decrease. Converged when the gradient max-norm falls to
// tol or below; one extra Newton step is then taken, so reported coefficients
// sit essentially at machine precision and the recorded gradient norm is the
// post-polish value.
//
// Errors: EstimationError "degenerate response" when y has a single class;
// EstimationError "separation" when the coefficient norm diverges;
// ValidationError on dimension problems. Non-convergence within max_iter is
// not an error: the fit comes back with converged = false.
ProbitFit fit_probit(const Matrix& X, const std::vector<std::uint8_t>& y, double tol = 1e-8,
                     int max_iter = 100);

ProbitFit fit_probit_opts(const Matrix& X, const std::vector<std::uint8_t>& y,
                          const ProbitOptions& opts);

// Phi(x'beta) for a covariate vector x (intercept appended internally),
// clamped to (0,1).
double predict_probit(const ProbitFit& fit, const std::vector<double>& x);

// Design matrix of a dataset: leading intercept column followed by the
// covariates in schema order.
Matrix build_design_matrix(const Dataset& ds);

} // namespace didipw
