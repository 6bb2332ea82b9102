#include <benchmark/benchmark.h>

#include "gincorr/asymptotics.hpp"
#include "gincorr/ginue_exact.hpp"

using namespace gincorr;
using C = std::complex<double>;

static void BM_theorem_ratio_exact(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    PointConfig p{C{0.5, 0.0}, {C{0, 0}, C{1, 0}}, n};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ginue_theorem_ratio_exact(p));
    }
}
BENCHMARK(BM_theorem_ratio_exact)->Arg(64)->Arg(256)->Arg(1024);

static void BM_av_confluent(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<ConfluentPoint> pts = {{std::sqrt(double(n)) * C{0.5, 0.0}, 2}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(av_confluent(pts, n));
    }
}
BENCHMARK(BM_av_confluent)->Arg(64)->Arg(256);

static void BM_f1_quadrature(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(f1_quadrature(C{0.5, 0.0}, n));
    }
}
BENCHMARK(BM_f1_quadrature)->Arg(100)->Arg(10000);

static void BM_barnes_g_log(benchmark::State& state) {
    double x = 3.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(barnes_g_log(x));
    }
}
BENCHMARK(BM_barnes_g_log);
