#include <benchmark/benchmark.h>

#include "msiforge/msi.hpp"

using namespace msiforge;

namespace {

struct Fixture {
    modsym::ManinBasis basis{11};
    std::vector<modsym::EigenData> eigen = modsym::eigen_decompose(basis, {2, 3, 5});
    coleman::PeriodMatrix A = coleman::period_matrix(basis, eigen, 3, 6);
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

} // namespace

static void BM_sample_instance(benchmark::State& state) {
    auto& f = fixture();
    auto model = msi::build_path_model_manin(f.basis, 8);
    int i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(msi::sample_instance(model, f.A, std::to_string(i++)));
    }
}
BENCHMARK(BM_sample_instance);

static void BM_solve_bruteforce(benchmark::State& state) {
    auto& f = fixture();
    int L = static_cast<int>(state.range(0));
    auto model = msi::build_path_model_manin(f.basis, L);
    auto inst = msi::sample_instance(model, f.A, "bench");
    for (auto _ : state) {
        benchmark::DoNotOptimize(msi::solve_bruteforce(inst, model, f.A));
    }
}
BENCHMARK(BM_solve_bruteforce)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_solve_mitm(benchmark::State& state) {
    auto& f = fixture();
    int L = static_cast<int>(state.range(0));
    auto model = msi::build_path_model_manin(f.basis, L);
    auto inst = msi::sample_instance(model, f.A, "bench");
    for (auto _ : state) {
        benchmark::DoNotOptimize(msi::solve_mitm(inst, model, f.A));
    }
}
BENCHMARK(BM_solve_mitm)->Arg(4)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_collision_experiment(benchmark::State& state) {
    auto& f = fixture();
    auto A2 = coleman::period_matrix(f.basis, f.eigen, 3, 2);
    auto model = msi::build_path_model_manin(f.basis, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            msi::collision_experiment(model, A2, 0, std::string(64, '0'), msi::kDefaultWorkCap, 1));
    }
}
BENCHMARK(BM_collision_experiment)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
