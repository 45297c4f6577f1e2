#include <benchmark/benchmark.h>

#include "qchain/fock.hpp"

using namespace qchain;

namespace {

const ChainSpec kSpec({0.8, 1.0}, 0.3, 0.0, 0.7, 0.4, 0.8);

void BM_SectorLiouvillian(benchmark::State& state)
{
    const auto model = fock::build_model(kSpec, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fock::liouvillian(model, fock::Restriction::SteadySector));
}
BENCHMARK(BM_SectorLiouvillian)->Arg(6)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_SolveOracle(benchmark::State& state)
{
    const auto model = fock::build_model(kSpec, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fock::solve_oracle(model));
}
BENCHMARK(BM_SolveOracle)->Arg(6)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
