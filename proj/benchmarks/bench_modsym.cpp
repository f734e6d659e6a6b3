#include <benchmark/benchmark.h>

#include "msiforge/coleman.hpp"
#include "msiforge/modsym.hpp"

using namespace msiforge;

static void BM_manin_basis(benchmark::State& state) {
    long long N = state.range(0);
    for (auto _ : state) {
        modsym::ManinBasis basis(N);
        benchmark::DoNotOptimize(basis.rank());
    }
}
BENCHMARK(BM_manin_basis)->Arg(11)->Arg(37)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_hecke_matrix(benchmark::State& state) {
    modsym::ManinBasis basis(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(modsym::hecke_matrix(basis, 2));
    }
}
BENCHMARK(BM_hecke_matrix)->Arg(11)->Arg(37)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_eigen_decompose(benchmark::State& state) {
    modsym::ManinBasis basis(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(modsym::eigen_decompose(basis, {2, 3, 5, 7}));
    }
}
BENCHMARK(BM_eigen_decompose)->Arg(11)->Arg(37)->Unit(benchmark::kMillisecond);

static void BM_period_vector(benchmark::State& state) {
    modsym::ManinBasis basis(11);
    auto eigen = modsym::eigen_decompose(basis, {2, 3, 5});
    modsym::HomologyClass g;
    g.level = 11;
    g.coords = {mpz_class(5), mpz_class(-3), mpz_class(7)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(coleman::period_vector_rational(g, eigen, 3, 6));
    }
}
BENCHMARK(BM_period_vector);

BENCHMARK_MAIN();
