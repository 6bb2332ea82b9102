#include <benchmark/benchmark.h>

#include "gincorr/matrix_core.hpp"

using namespace gincorr;

static void BM_log_abs_det_sq(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto m = sample_matrix(n, EntryDistribution::complex_gaussian(), 7);
    ComplexMatrix work;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_abs_det_sq(m, {0.3, 0.1}, work));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_log_abs_det_sq)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);

static void BM_char_poly_product_m2(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto m = sample_matrix(n, EntryDistribution::complex_gaussian(), 7);
    std::vector<std::complex<double>> zs = {{0.0, 0.0}, {1.0 / std::sqrt(double(n)), 0.0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(char_poly_log_product(m, zs));
    }
}
BENCHMARK(BM_char_poly_product_m2)->RangeMultiplier(2)->Range(16, 256);

BENCHMARK_MAIN();
