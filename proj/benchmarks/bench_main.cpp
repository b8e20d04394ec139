#include <multikink/ansatz.hpp>
#include <multikink/construct.hpp>
#include <multikink/evolve.hpp>
#include <multikink/kink.hpp>
#include <multikink/spectral.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace mk;

namespace {

MultikinkAnsatz sg_pair() {
    const Potential W = Potential::sine_gordon();
    const VacuumTable table = find_vacua(W, W.search_interval());
    const double a = std::log(0.3) * std::sqrt(1.0 - 0.09);
    return {W, table, MultikinkParams::make(validate_chain(table, {0, 1, 2}), {-0.3, 0.3}, {a, -a})};
}

void BM_KinkProfile(benchmark::State& state) {
    const Potential W = Potential::phi4();
    const VacuumTable table = find_vacua(W, W.search_interval());
    ProfileOptions opts;
    opts.dx = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kink_profile(W, table, 0, 1, opts));
}
BENCHMARK(BM_KinkProfile)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_LowSpectrum(benchmark::State& state) {
    const Potential W = Potential::sine_gordon();
    const VacuumTable table = find_vacua(W, W.search_interval());
    const auto half = static_cast<std::size_t>(state.range(0));
    const OperatorDiscretization L = build_L(W, table, 0, 1, UniformGrid::symmetric(half, 20.0 / half));
    for (auto _ : state) benchmark::DoNotOptimize(low_spectrum(L, 4));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LowSpectrum)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_EvolveNonlinear(benchmark::State& state) {
    const MultikinkAnsatz a = sg_pair();
    EvolveConfig c;
    c.dx = 0.05;
    c.dt = 0.04;
    c.x_min = -40.0;
    c.x_max = 40.0;
    c.t_end = 0.04 * static_cast<double>(state.range(0));
    const FieldState s = multikink(a, 0.0, c.grid());
    for (auto _ : state) benchmark::DoNotOptimize(evolve_nonlinear(s, a.model(), c));
    state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(c.grid().n));
}
BENCHMARK(BM_EvolveNonlinear)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_SolveR(benchmark::State& state) {
    const ConstructionProblem problem(sg_pair(), ConstructConfig{});
    LevelField f(problem.levels(), std::vector<double>(problem.grid().n, 0.0));
    for (std::size_t l = 0; l < problem.levels(); ++l) f[l] = problem.nonlinearity(l, std::vector<double>(problem.grid().n, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_R(problem, f));
}
BENCHMARK(BM_SolveR)->Unit(benchmark::kMillisecond);

void BM_FixedPoint(benchmark::State& state) {
    const ConstructionProblem problem(sg_pair(), ConstructConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(fixed_point(problem, 1e-9, 60));
}
BENCHMARK(BM_FixedPoint)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
