#pragma once

// Test-only oracles, independent of the library implementations they check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

// Gauss-Legendre nodes/weights on [-1,1], computed in long double by Newton
// iteration on the Legendre polynomial. Accurate to ~1e-19.
struct GaussLegendre {
    std::vector<long double> nodes;
    std::vector<long double> weights;

    explicit GaussLegendre(int n) {
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            // Chebyshev initial guess for the i-th root.
            long double x = std::cos(M_PIl * (i + 0.75L) / (n + 0.5L));
            for (int iter = 0; iter < 100; ++iter) {
                // Evaluate P_n and P_{n-1} by recurrence.
                long double p0 = 1.0L, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
                const long double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-19L) break;
            }
            nodes[i] = x;
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
            weights[i] = 2.0L / ((1.0L - x * x) * dp * dp);
        }
    }
};

// Integral of f over [a,b] with 16-point Gauss-Legendre panels of width <=
// 0.25; effectively exact for smooth integrands at double precision.
inline long double integrate(const std::function<long double(long double)>& f, long double a,
                             long double b) {
    static const GaussLegendre gl(16);
    const int panels = std::max(1, static_cast<int>(std::ceil(std::fabs(double(b - a)) / 0.25)));
    const long double h = (b - a) / panels;
    long double total = 0.0L;
    for (int k = 0; k < panels; ++k) {
        const long double lo = a + k * h;
        const long double mid = lo + 0.5L * h;
        const long double half = 0.5L * h;
        long double panel = 0.0L;
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
            panel += gl.weights[j] * f(mid + half * gl.nodes[j]);
        }
        total += panel * half;
    }
    return total;
}

// Phi(x) by quadrature of the Gaussian density from 0, in long double.
inline double normal_cdf(double x) {
    static const long double inv_root_2pi = 0.3989422804014326779399461L;
    const auto density = [](long double t) {
        return inv_root_2pi * std::exp(-0.5L * t * t);
    };
    return static_cast<double>(0.5L + integrate(density, 0.0L, static_cast<long double>(x)));
}

// Central-difference gradient of a scalar function.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double save = x[j];
        x[j] = save + h;
        const double up = f(x);
        x[j] = save - h;
        const double down = f(x);
        x[j] = save;
        g[j] = (up - down) / (2.0 * h);
    }
    return g;
}

// Central-difference Jacobian of a vector function (used for Hessian checks
// via the analytic gradient).
inline std::vector<std::vector<double>> fd_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-5) {
    std::vector<std::vector<double>> jac;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double save = x[j];
        x[j] = save + h;
        const std::vector<double> up = f(x);
        x[j] = save - h;
        const std::vector<double> down = f(x);
        x[j] = save;
        std::vector<double> col(up.size());
        for (std::size_t i = 0; i < up.size(); ++i) col[i] = (up[i] - down[i]) / (2.0 * h);
        jac.push_back(std::move(col));
    }
    return jac;
}

// Two-pass mean/variance, the brute-force cross-check for summary stats.
struct MeanVar {
    double mean = 0.0;
    double var = 0.0; // sample variance, n-1
};

inline MeanVar mean_var(const std::vector<double>& v) {
    MeanVar mv;
    if (v.empty()) return mv;
    double s = 0.0;
    for (double x : v) s += x;
    mv.mean = s / v.size();
    if (v.size() > 1) {
        double sq = 0.0;
        for (double x : v) sq += (x - mv.mean) * (x - mv.mean);
        mv.var = sq / (v.size() - 1);
    }
    return mv;
}

} // namespace oracles
