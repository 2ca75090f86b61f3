#include <benchmark/benchmark.h>

#include "didipw/atet.hpp"
#include "didipw/dgp.hpp"
#include "didipw/inference.hpp"

using namespace didipw;

namespace {

Generated baseline(int n) {
    SimConfig cfg;
    cfg.n = n;
    cfg.seed = 7;
    return generate(cfg);
}

} // namespace

static void Generate(benchmark::State& state) {
    SimConfig cfg;
    cfg.n = static_cast<int>(state.range(0));
    std::int64_t seed = 0;
    for (auto _ : state) {
        cfg.seed = seed++;
        benchmark::DoNotOptimize(generate(cfg).dataset.size());
    }
}
BENCHMARK(Generate)->Arg(4000);

static void EstimateAtet(benchmark::State& state) {
    const Generated g = baseline(static_cast<int>(state.range(0)));
    DesignConfig cfg;
    cfg.covariate_names = g.dataset.covariate_names;
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_atet(g.dataset, cfg).effect);
    }
}
BENCHMARK(EstimateAtet)->Arg(4000)->Arg(20000);

static void BootstrapInference(benchmark::State& state) {
    const Generated g = baseline(4000);
    DesignConfig cfg;
    cfg.covariate_names = g.dataset.covariate_names;
    cfg.bootstrap_reps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_inference(g.dataset, cfg).std_error);
    }
}
BENCHMARK(BootstrapInference)->Arg(50)->Arg(199)->Unit(benchmark::kMillisecond);
