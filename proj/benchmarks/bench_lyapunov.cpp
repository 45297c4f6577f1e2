#include <benchmark/benchmark.h>

#include "qchain/gaussian.hpp"
#include "qchain/lyapunov.hpp"
#include "qchain/model.hpp"

using namespace qchain;

namespace {

gaussian::DriftDiffusion chain(std::size_t n)
{
    const ChainSpec spec(linear_profile(0.4, 1.0, n), 0.25, 0.0, 2.0, 0.5, 1.0);
    return gaussian::build_drift_diffusion(spec);
}

void BM_SolveSchur(benchmark::State& state)
{
    const auto dd = chain(static_cast<std::size_t>(state.range(0)));
    const RMatrix c = -dd.diffusion;
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov::solve_schur(dd.drift, c));
}
BENCHMARK(BM_SolveSchur)->Arg(2)->Arg(5)->Arg(20)->Arg(50);

void BM_SolveKronecker(benchmark::State& state)
{
    const auto dd = chain(static_cast<std::size_t>(state.range(0)));
    const RMatrix c = -dd.diffusion;
    for (auto _ : state) benchmark::DoNotOptimize(lyapunov::solve_kronecker(dd.drift, c));
}
BENCHMARK(BM_SolveKronecker)->Arg(2)->Arg(5)->Arg(10);

void BM_SteadyState(benchmark::State& state)
{
    const auto dd = chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gaussian::solve_steady(dd));
}
BENCHMARK(BM_SteadyState)->Arg(2)->Arg(20);

} // namespace

BENCHMARK_MAIN();
