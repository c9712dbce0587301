#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "hawkesim/engine.hpp"
#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"
#include "hawkesim/rng.hpp"
#include "hawkesim/stats.hpp"

namespace {

using namespace hawkes;

void bm_thinning_exponential(benchmark::State& state) {
    const double T = static_cast<double>(state.range(0));
    const Simulator sim(Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0));
    std::uint64_t rep = 0;
    double events = 0.0;
    for (auto _ : state) {
        RngStream rng(1, StreamPurpose::simulate, 0, rep++);
        const PathResult p = sim.simulate_thinning(T, rng);
        benchmark::DoNotOptimize(p.compensator);
        events += p.count;
    }
    state.counters["events_per_s"] =
        benchmark::Counter(events, benchmark::Counter::kIsRate);
}
BENCHMARK(bm_thinning_exponential)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void bm_thinning_erlang(benchmark::State& state) {
    const double T = static_cast<double>(state.range(0));
    const Simulator sim(Kernel::erlang(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(1, StreamPurpose::simulate, 1, rep++);
        benchmark::DoNotOptimize(sim.simulate_thinning(T, rng).count);
    }
}
BENCHMARK(bm_thinning_erlang)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_cluster_exponential(benchmark::State& state) {
    const double T = static_cast<double>(state.range(0));
    const Simulator sim(Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(1, StreamPurpose::cluster, 0, rep++);
        benchmark::DoNotOptimize(sim.simulate_cluster(T, rng).count);
    }
}
BENCHMARK(bm_cluster_exponential)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_coupled_addpoint(benchmark::State& state) {
    const double T = static_cast<double>(state.range(0));
    const Simulator sim(Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream rng(1, StreamPurpose::coupled, 0, rep++);
        benchmark::DoNotOptimize(
            sim.simulate_coupled_addpoint(T, 0.25 * T, rng).extra_count);
    }
}
BENCHMARK(bm_coupled_addpoint)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void bm_solve_psi(benchmark::State& state) {
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const double horizon = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_psi(k, 0.01, horizon).l1_estimate);
    }
}
BENCHMARK(bm_solve_psi)->Arg(100)->Arg(800)->Unit(benchmark::kMillisecond);

void bm_w1_distance(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    RngStream rng(3, StreamPurpose::generic, 0, 0);
    std::vector<double> xs(n);
    for (double& x : xs) x = rng.normal(0.0, 1.4142135623730951);
    std::sort(xs.begin(), xs.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(w1_distance_to_normal(xs, 2.0));
    }
}
BENCHMARK(bm_w1_distance)->Arg(20000)->Arg(50000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
