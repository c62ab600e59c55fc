#include <benchmark/benchmark.h>

#include <array>
#include <numbers>
#include <vector>

#include "foliate/flow.hpp"
#include "foliate/foliation.hpp"
#include "foliate/manybody.hpp"
#include "foliate/wavefield.hpp"

using namespace foliate;

namespace {

constexpr double kL = 2.0 * std::numbers::pi;

ScalarWavePacket packet(int modes)
{
    std::vector<Mode> m;
    for (int j = 0; j < modes; ++j) m.push_back({j - modes / 2, {1.0 / (1 + j), 0.3 * j}});
    return normalize(ScalarWavePacket(1.0, kL, m));
}

ScalarWavePacket skewed() { return normalize(ScalarWavePacket(1.0, kL, {{0, 1.0}, {10, 0.2}})); }

void BM_Current(benchmark::State& state)
{
    const auto p = packet(static_cast<int>(state.range(0)));
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(p.current({t, 1.3}));
        t += 1e-3;
    }
}
BENCHMARK(BM_Current)->Arg(1)->Arg(4)->Arg(8)->Arg(32);

void BM_Divergence(benchmark::State& state)
{
    const auto p = packet(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(p.divergence({0.4, 1.3}));
}
BENCHMARK(BM_Divergence)->Arg(4)->Arg(8)->Arg(32);

void BM_ClassificationMap(benchmark::State& state)
{
    const auto p = skewed();
    const GridSpec grid{0.0, kL, 0.0, kL, 101, 256};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            classification_map(p, grid, kDefaultZeroTol, kDefaultClassTol, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_ClassificationMap)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_TraceCurve(benchmark::State& state)
{
    const auto p = skewed();
    for (auto _ : state) benchmark::DoNotOptimize(trace_curve(p, {0.0, 0.7}, 16.0));
}
BENCHMARK(BM_TraceCurve)->Unit(benchmark::kMicrosecond);

void BM_Flux(benchmark::State& state)
{
    const auto p = skewed();
    const auto leaf = advect_leaf(p, Hypersurface::time_slice(0.0, 128, kL), 2.0).leaf;
    for (auto _ : state) benchmark::DoNotOptimize(flux(p, leaf));
}
BENCHMARK(BM_Flux)->Unit(benchmark::kMicrosecond);

void BM_AdaptedSeed(benchmark::State& state)
{
    const auto p = skewed();
    AdaptedSeedOptions opt;
    opt.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(adapted_seed(p, 0.0, 128, opt));
}
BENCHMARK(BM_AdaptedSeed)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Foliation(benchmark::State& state)
{
    const auto p = skewed();
    const auto seed = adapted_seed(p, 0.0, 128);
    FoliationOptions opt;
    opt.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_foliation(p, seed, 8, 2.0, 32, opt));
}
BENCHMARK(BM_Foliation)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_PairCurrent(benchmark::State& state)
{
    const auto mb = normalize(ManyBodyPacket::symmetrize(
        2, 1.0, kL, {{1.0, {1, -1}}, {{0.3, 0.2}, {2, 0}}, {0.5, {-3, 3}}}));
    const std::array<SpacetimePoint, 2> xs{SpacetimePoint{0.1, 0.2}, SpacetimePoint{0.7, 3.1}};
    for (auto _ : state) benchmark::DoNotOptimize(mb.current(xs));
}
BENCHMARK(BM_PairCurrent);

void BM_PairProbability(benchmark::State& state)
{
    const auto mb = normalize(ManyBodyPacket::symmetrize(2, 1.0, kL, {{1.0, {1, -1}}}));
    const auto slice = Hypersurface::time_slice(0.0, 32, kL);
    const std::array<Hypersurface, 2> leaves{slice, slice};
    const std::array<std::pair<double, double>, 2> full{{{0, 1}, {0, 1}}};
    for (auto _ : state) benchmark::DoNotOptimize(probability_n(mb, leaves, full));
}
BENCHMARK(BM_PairProbability)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
