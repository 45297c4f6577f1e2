#include <sstream>

#include <benchmark/benchmark.h>

#include "qchain_cli/commands.hpp"
#include "qchain_cli/config.hpp"

using namespace qchain;

namespace {

cli::ScenarioConfig sweep_config(long n_sites)
{
    std::istringstream in("n_sites = " + std::to_string(n_sites) +
                          "\nomega_first = 0.4\nomega_last = 1\nepsilon = 0.25\ngamma = 2\nt_cold = 0.5\nt_hot = 1\n"
                          "[sweep]\nlo = 0.01\nhi = 2\nsteps = 200\n");
    return cli::parse_config(in);
}

void BM_Sweep(benchmark::State& state)
{
    const auto cfg = sweep_config(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cli::run_sweep(cfg, 1));
}
BENCHMARK(BM_Sweep)->Arg(2)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
