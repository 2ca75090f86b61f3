#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "didipw/normal.hpp"
#include "didipw/rng.hpp"
#include "oracles.hpp"

using namespace didipw;

TEST_SUITE_BEGIN("normal");

TEST_CASE("cdf at zero is one half") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cdf matches the 97.5% quantile") {
    // Phi(1.959964) = 0.975 to 1e-6 (quadrature-backed below at 1e-12).
    CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
}

TEST_CASE("reflection identity") {
    CHECK(std_normal_cdf(-3.0) == doctest::Approx(1.0 - std_normal_cdf(3.0)).epsilon(1e-14));
}

TEST_CASE("cdf agrees with quadrature oracle to 1e-12 on [-8, 8]") {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = -8.0 + 16.0 * i / 1000.0;
        worst = std::max(worst, std::fabs(std_normal_cdf(x) - oracles::normal_cdf(x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("cdf is monotone and complements to one") {
    double prev = -1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double x = -10.0 + 20.0 * i / 2000.0;
        const double p = std_normal_cdf(x);
        CHECK(p >= prev);
        prev = p;
        CHECK(std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-14);
    }
}

TEST_CASE("non-finite input is a domain error") {
    CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(std_normal_cdf(INFINITY), std::domain_error);
}

TEST_CASE("quantile inverts the cdf") {
    for (double p : {1e-10, 1e-4, 0.025, 0.3, 0.5, 0.7, 0.975, 0.9999, 1.0 - 1e-10}) {
        const double x = std_normal_quantile(p);
        CHECK(std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
}

TEST_CASE("cdf_pdf returns consistent pair") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const double x = 6.0 * (rng.next_unit() - 0.5);
        double c, p;
        std_normal_cdf_pdf(x, c, p);
        CHECK(c == std_normal_cdf(x));
        CHECK(p == doctest::Approx(std_normal_pdf(x)).epsilon(1e-14));
    }
}

TEST_CASE("student t cdf approaches the normal for large df") {
    for (double t : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        CHECK(student_t_cdf(t, 1e7) == doctest::Approx(std_normal_cdf(t)).epsilon(1e-6));
    }
}

TEST_CASE("student t cdf matches quadrature of the t density") {
    // Direct integration of the t density as an independent check.
    for (const double df : {3.0, 10.0, 47.5}) {
        const long double norm =
            std::exp(static_cast<long double>(std::lgamma((df + 1.0) / 2.0) -
                                              std::lgamma(df / 2.0))) /
            std::sqrt(df * M_PIl);
        const auto density = [&](long double u) {
            return norm * std::pow(1.0L + u * u / df, -(df + 1.0L) / 2.0L);
        };
        for (const double t : {-1.5, 0.0, 0.7, 2.2}) {
            const double expected = static_cast<double>(
                0.5L + oracles::integrate(density, 0.0L, static_cast<long double>(t)));
            CHECK(student_t_cdf(t, df) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_SUITE_END();
