#include <benchmark/benchmark.h>

#include "tilelab/divergences.hpp"
#include "tilelab/quadrature.hpp"

namespace {

void BM_KlQuadratureCauchy(benchmark::State& state) {
    const auto fam = tilelab::ErrorFamily::cauchy();
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilelab::kl_quadrature(fam, 0.7, 1.4));
    }
}
BENCHMARK(BM_KlQuadratureCauchy);

void BM_HellingerAld(benchmark::State& state) {
    const auto fam = tilelab::ErrorFamily::ald(0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilelab::hellinger_sq(fam, 0.4, 0.9));
    }
}
BENCHMARK(BM_HellingerAld);

void BM_UpperIncompleteGamma(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilelab::upper_incomplete_gamma(2.5, 1.5));
    }
}
BENCHMARK(BM_UpperIncompleteGamma);

}  // namespace
