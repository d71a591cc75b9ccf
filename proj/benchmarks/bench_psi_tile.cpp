#include <benchmark/benchmark.h>

#include "tilelab/psi_tile.hpp"

namespace {

void BM_PopulationExpectile(benchmark::State& state) {
    const tilelab::LocScaleMember m{tilelab::ErrorFamily::asym_normal(0.7), 0.3, 1.2};
    const auto psi = tilelab::PsiSpec::expectile(0.4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilelab::psi_tile_of_density(m, psi));
    }
}
BENCHMARK(BM_PopulationExpectile);

void BM_EmpiricalTile(benchmark::State& state) {
    const auto draws =
        tilelab::sample(tilelab::LocScaleMember{tilelab::ErrorFamily::ald(0.3), 0.0, 1.0}, 11,
                        static_cast<std::size_t>(state.range(0)));
    const auto psi = tilelab::PsiSpec::huber(0.6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tilelab::empirical_psi_tile(draws, psi));
    }
}
BENCHMARK(BM_EmpiricalTile)->Arg(1024)->Arg(16384);

}  // namespace
