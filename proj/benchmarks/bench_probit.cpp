#include <benchmark/benchmark.h>

#include "didipw/normal.hpp"
#include "didipw/probit.hpp"
#include "didipw/rng.hpp"

using namespace didipw;

namespace {

struct ProbitData {
    Matrix X;
    std::vector<std::uint8_t> y;
};

ProbitData make_data(std::size_t n, std::size_t covariates) {
    Rng rng(7);
    ProbitData data{Matrix(n, covariates + 1), std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        data.X(i, 0) = 1.0;
        double eta = 0.2;
        for (std::size_t j = 1; j <= covariates; ++j) {
            data.X(i, j) = rng.next_normal();
            eta += 0.3 * data.X(i, j);
        }
        data.y[i] = rng.next_unit() < std_normal_cdf(eta) ? 1 : 0;
    }
    return data;
}

} // namespace

static void NormalCdf(benchmark::State& state) {
    double x = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(std_normal_cdf(x));
        x += 1e-4;
        if (x > 6.0) x = -6.0;
    }
}
BENCHMARK(NormalCdf);

static void ProbitNllEval(benchmark::State& state) {
    const auto data = make_data(static_cast<std::size_t>(state.range(0)), 3);
    const std::vector<double> beta = {0.1, 0.2, 0.2, 0.2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(probit_nll(beta, data.X, data.y).value);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(ProbitNllEval)->Range(1 << 10, 1 << 15)->Complexity(benchmark::oN);

static void ProbitFitCold(benchmark::State& state) {
    const auto data = make_data(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_probit(data.X, data.y).coefficients);
    }
}
BENCHMARK(ProbitFitCold)->Arg(4000)->Arg(20000);

static void ProbitFitWarm(benchmark::State& state) {
    const auto data = make_data(static_cast<std::size_t>(state.range(0)), 3);
    ProbitOptions opts;
    opts.start = fit_probit(data.X, data.y).coefficients;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_probit_opts(data.X, data.y, opts).coefficients);
    }
}
BENCHMARK(ProbitFitWarm)->Arg(4000)->Arg(20000);
