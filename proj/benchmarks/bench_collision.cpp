#include <benchmark/benchmark.h>

#include "qchain/collision.hpp"
#include "qchain/fock.hpp"

using namespace qchain;

namespace {

const ChainSpec kSpec({0.6, 1.0}, 0.3, 0.0, 0.5, 0.3, 0.6);

void BM_FirstStroke(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    const CMatrix rho = fock::solve_oracle(fock::build_model(kSpec, d)).rho;
    for (auto _ : state) {
        const collision::StrokePropagator prop(kSpec, 0.01, 0.7, d);
        benchmark::DoNotOptimize(prop.stroke(rho));
    }
}
BENCHMARK(BM_FirstStroke)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RepeatedStroke(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    const CMatrix rho = fock::solve_oracle(fock::build_model(kSpec, d)).rho;
    const collision::StrokePropagator prop(kSpec, 0.01, 0.7, d);
    (void)prop.stroke(rho);
    for (auto _ : state) benchmark::DoNotOptimize(prop.stroke(rho));
}
BENCHMARK(BM_RepeatedStroke)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
