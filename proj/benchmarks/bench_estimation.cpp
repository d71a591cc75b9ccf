#include <benchmark/benchmark.h>

#include "tilelab/harness.hpp"

namespace {

void BM_SimulateAndBinnedFit(benchmark::State& state) {
    tilelab::RateExperiment config;
    config.family = tilelab::ErrorFamily::ald(0.5);
    config.psi = tilelab::PsiSpec::quantile(0.5);
    const auto inst = tilelab::make_instance(config);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const int m = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
    for (auto _ : state) {
        const auto data = tilelab::simulate(inst, n, 99);
        auto fit = tilelab::fit_binned_psi_tile(data, config.psi, m);
        benchmark::DoNotOptimize(tilelab::l2_risk(fit.predictor, inst, 256));
    }
}
BENCHMARK(BM_SimulateAndBinnedFit)->Arg(4096)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
