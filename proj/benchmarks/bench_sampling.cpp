#include <benchmark/benchmark.h>

#include "gincorr/hciz.hpp"
#include "gincorr/matrix_core.hpp"

using namespace gincorr;

static void BM_sample_matrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int kind = static_cast<int>(state.range(1));
    EntryDistribution dist = kind == 0   ? EntryDistribution::complex_gaussian()
                             : kind == 1 ? EntryDistribution::uniform_phase()
                                         : EntryDistribution::radial_two_point(0.25);
    RngStream rng(11);
    ComplexMatrix m;
    for (auto _ : state) {
        sample_matrix_into(m, n, dist, rng);
        benchmark::DoNotOptimize(m.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_sample_matrix)->ArgsProduct({{48, 128}, {0, 1, 2}});

static void BM_haar_unitary(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    RngStream rng(13);
    for (auto _ : state) {
        benchmark::DoNotOptimize(haar_sample_unitary(d, rng));
    }
}
BENCHMARK(BM_haar_unitary)->Arg(2)->Arg(3)->Arg(8);
