#include "didipw/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace didipw {

namespace {

constexpr double kRoot2Pi = 2.506628274631000502;

// Hart/Miller rational coefficients for the upper tail on |z| < 10/sqrt(2).
constexpr double kP0 = 220.2068679123761;
constexpr double kP1 = 221.2135961699311;
constexpr double kP2 = 112.0792914978709;
constexpr double kP3 = 33.91286607838300;
constexpr double kP4 = 6.373962203531650;
constexpr double kP5 = 0.7003830644436881;
constexpr double kP6 = 0.03526249659989109;

constexpr double kQ0 = 440.4137358247522;
constexpr double kQ1 = 793.8265125199484;
constexpr double kQ2 = 637.3336333788311;
constexpr double kQ3 = 296.5642487796737;
constexpr double kQ4 = 86.78073220294608;
constexpr double kQ5 = 16.06417757920695;
constexpr double kQ6 = 1.755667163182642;
constexpr double kQ7 = 0.08838834764831844;

constexpr double kCutoff = 7.071; // 10/sqrt(2)

void check_finite(double x, const char* who) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(who) + ": non-finite input");
    }
}

// Upper tail Q(|z|) and the density, shared by cdf and cdf_pdf.
void upper_tail(double zabs, double& q, double& pdf) {
    const double expntl = std::exp(-0.5 * zabs * zabs);
    pdf = expntl / kRoot2Pi;
    if (zabs < kCutoff) {
        q = expntl *
            ((((((kP6 * zabs + kP5) * zabs + kP4) * zabs + kP3) * zabs + kP2) * zabs + kP1) *
                 zabs +
             kP0) /
            (((((((kQ7 * zabs + kQ6) * zabs + kQ5) * zabs + kQ4) * zabs + kQ3) * zabs + kQ2) *
                  zabs +
              kQ1) *
                 zabs +
             kQ0);
    } else {
        // Mills-ratio continued fraction for the far tail.
        q = pdf / (zabs + 1.0 / (zabs + 2.0 / (zabs + 3.0 / (zabs + 4.0 / (zabs + 0.65)))));
    }
}

} // namespace

double std_normal_cdf(double x) {
    check_finite(x, "std_normal_cdf");
    if (x > 37.0) return 1.0;
    if (x < -37.0) return 0.0;
    double q, pdf;
    upper_tail(std::fabs(x), q, pdf);
    return x < 0.0 ? q : 1.0 - q;
}

double std_normal_pdf(double x) {
    check_finite(x, "std_normal_pdf");
    return std::exp(-0.5 * x * x) / kRoot2Pi;
}

void std_normal_cdf_pdf(double x, double& cdf, double& pdf) {
    if (x > 37.0) {
        cdf = 1.0;
        pdf = 0.0;
        return;
    }
    if (x < -37.0) {
        cdf = 0.0;
        pdf = 0.0;
        return;
    }
    double q;
    upper_tail(std::fabs(x), q, pdf);
    cdf = x < 0.0 ? q : 1.0 - q;
}

double std_normal_quantile(double p) {
    check_finite(p, "std_normal_quantile");
    if (p <= 0.0 || p >= 1.0) {
        throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
    }

    // Acklam's rational approximation, ~1.15e-9 relative error.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the high-accuracy CDF.
    double cdf, pdf;
    std_normal_cdf_pdf(x, cdf, pdf);
    if (pdf > 0.0) {
        const double e = cdf - p;
        const double u = e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

namespace {

// Continued fraction for the incomplete beta (Lentz's algorithm).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("regularized_incomplete_beta: a, b must be positive");
    }
    if (!(x >= 0.0) || !(x <= 1.0)) {
        throw std::domain_error("regularized_incomplete_beta: x must lie in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) {
        throw std::domain_error("student_t_cdf: df must be positive");
    }
    if (!std::isfinite(t)) {
        return t > 0.0 ? 1.0 : 0.0;
    }
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

} // namespace didipw
