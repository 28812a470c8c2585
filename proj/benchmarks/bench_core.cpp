#include <benchmark/benchmark.h>

#include <cmath>

#include "horolab/functionals.hpp"
#include "horolab/lattice.hpp"
#include "horolab/limits.hpp"

using namespace horolab;

static void BM_ErgodicAverage(benchmark::State& state) {
    const auto f = make_power_observable({0.5, 1.5});
    const auto x = reference_points(1, 1).front();
    const double T = std::exp(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ergodic_average(f, x, T).value);
}
BENCHMARK(BM_ErgodicAverage)->DenseRange(2, 8, 2);

static void BM_OdeResidual(benchmark::State& state) {
    const auto f = make_power_observable({0.75, 0});
    const auto x = reference_points(1, 2).front();
    for (auto _ : state) benchmark::DoNotOptimize(ode_residual(f, x, 2.0).residual);
}
BENCHMARK(BM_OdeResidual);

static void BM_Functionals(benchmark::State& state) {
    const auto f = make_power_observable({0.5, 1.5});
    const auto xs = reference_points(1, 3);
    const auto n = window_norms(f, orbit_window(f, xs, {1}));
    for (auto _ : state) benchmark::DoNotOptimize(functionals(f, xs[0], n).d_plus);
}
BENCHMARK(BM_Functionals);

static void BM_WindowNorms(benchmark::State& state) {
    const auto f = make_power_observable({0.75, 0});
    const auto w = orbit_window(f, reference_points(static_cast<std::size_t>(state.range(0)), 4), {1, 100});
    for (auto _ : state) benchmark::DoNotOptimize(window_norms(f, w).c2);
}
BENCHMARK(BM_WindowNorms)->Arg(1)->Arg(10);

static void BM_Reduce(benchmark::State& state) {
    const auto grp = FuchsianGroup::regular_octagon();
    const auto g = geodesic(k_matrix(0.3), 5.0);
    for (auto _ : state) benchmark::DoNotOptimize(reduce(grp, g).word.size());
}
BENCHMARK(BM_Reduce);

static void BM_HaarSample(benchmark::State& state) {
    const auto grp = FuchsianGroup::regular_octagon();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_haar(grp, 100, ++seed).size());
}
BENCHMARK(BM_HaarSample);

static void BM_LevyDistance(benchmark::State& state) {
    std::vector<double> a, b;
    for (int i = 0; i < state.range(0); ++i) {
        a.push_back(std::sin(i * 1.7));
        b.push_back(std::cos(i * 0.9) + 0.1);
    }
    const EmpiricalDistribution F(a), G(b);
    for (auto _ : state) benchmark::DoNotOptimize(levy_distance(F, G));
}
BENCHMARK(BM_LevyDistance)->Arg(100)->Arg(10000);
BENCHMARK_MAIN();
