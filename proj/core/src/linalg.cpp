#include "didipw/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "didipw/common.hpp"

namespace didipw {

bool cholesky_factor(std::vector<double>& a, std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        double diag = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * p + k] * a[j * p + k];
        if (!(diag > 0.0)) return false;
        const double ljj = std::sqrt(diag);
        a[j * p + j] = ljj;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = s / ljj;
        }
    }
    // Zero the strictly upper triangle so the factor is unambiguous.
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) a[i * p + j] = 0.0;
    return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t p, std::vector<double>& b) {
    // Forward substitution L y = b.
    for (std::size_t i = 0; i < p; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * p + k] * b[k];
        b[i] = s / l[i * p + i];
    }
    // Back substitution L^T x = y.
    for (std::size_t ii = p; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) s -= l[k * p + ii] * b[k];
        b[ii] = s / l[ii * p + ii];
    }
}

std::vector<double> solve_spd(std::vector<double> a, std::size_t p, std::vector<double> b) {
    if (!cholesky_factor(a, p)) {
        throw EstimationError("solve_spd: singular or indefinite system");
    }
    cholesky_solve(a, p, b);
    return b;
}

std::vector<double> invert_spd(const std::vector<double>& a, std::size_t p) {
    std::vector<double> l = a;
    if (!cholesky_factor(l, p)) {
        throw EstimationError("invert_spd: singular or indefinite matrix");
    }
    std::vector<double> inv(p * p, 0.0);
    std::vector<double> e(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        cholesky_solve(l, p, e);
        for (std::size_t i = 0; i < p; ++i) inv[i * p + j] = e[i];
    }
    return inv;
}

} // namespace didipw
