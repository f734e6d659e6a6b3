#include <benchmark/benchmark.h>

#include "msiforge/quadform.hpp"
#include "msiforge/util.hpp"

using namespace msiforge;

static void BM_reduce_form(benchmark::State& state) {
    std::vector<quad::QuadForm> inputs;
    SplitMix64 rng(1);
    while (inputs.size() < 256) {
        long long a = 1 + static_cast<long long>(rng.below(50));
        long long b = static_cast<long long>(rng.below(101)) - 50;
        long long c = 1 + static_cast<long long>(rng.below(50));
        if (b * b - 4 * a * c >= 0) continue;
        if (gcd_ll(gcd_ll(a, b), c) != 1) continue;
        inputs.emplace_back(a, b, c);
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(quad::reduce_form(inputs[i++ & 255]));
    }
}
BENCHMARK(BM_reduce_form);

static void BM_compose(benchmark::State& state) {
    quad::Discriminant d(-static_cast<long long>(state.range(0)));
    auto cls = quad::enumerate_class_group(d);
    SplitMix64 rng(2);
    std::size_t n = cls.size();
    for (auto _ : state) {
        const auto& f = cls[rng.below(n)];
        const auto& g = cls[rng.below(n)];
        benchmark::DoNotOptimize(quad::compose(f, g));
    }
}
BENCHMARK(BM_compose)->Arg(23)->Arg(1019)->Arg(9959);

static void BM_enumerate_class_group(benchmark::State& state) {
    quad::Discriminant d(-static_cast<long long>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quad::enumerate_class_group(d));
    }
}
BENCHMARK(BM_enumerate_class_group)->Arg(23)->Arg(1019)->Arg(9959);

static void BM_hilbert_class_poly(benchmark::State& state) {
    quad::Discriminant d(-static_cast<long long>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(quad::hilbert_class_poly_auto(d));
    }
}
BENCHMARK(BM_hilbert_class_poly)->Arg(23)->Arg(71)->Arg(311)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
