// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "tomosar/dictionary.hpp"
#include "tomosar/pipeline.hpp"
#include "tomosar/simulator.hpp"

using namespace tomosar;

namespace {

StackGeometry bench_geometry() {
    return {0.031, 661820.0, sample_baselines(41, 250.0, 1), uniform_temporal_baselines(41, 22.0, 20)};
}

ElevationMotionGrid bench_grid() {
    return ElevationMotionGrid::uniform({-40, 40, 2}, {-10, 10, 2}, {-6, 6, 1.5});
}

void BM_DictionaryParallel(benchmark::State& state) {
    const auto geo = bench_geometry();
    const auto grid = bench_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(build_dictionary(geo, grid));
}

void BM_DictionaryReference(benchmark::State& state) {
    const auto geo = bench_geometry();
    const auto grid = bench_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::build_dictionary(geo, grid));
}

void BM_ResponseParallel(benchmark::State& state) {
    const auto dict = build_dictionary(bench_geometry(), bench_grid());
    const CVector g = complex_noise(41, 1.0, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(steering_response(dict, g));
}

void BM_ResponseReference(benchmark::State& state) {
    const auto dict = build_dictionary(bench_geometry(), bench_grid());
    const CVector g = complex_noise(41, 1.0, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::steering_response(dict, g));
}

StackData bench_scene() {
    SceneOptions o;
    o.rows = 24;
    o.cols = 24;
    return simulate_scene(o);
}

PipelineConfig bench_config() {
    PipelineConfig c;
    c.penalty_coefficient = 16.0;
    return c;
}

void BM_PipelineParallel(benchmark::State& state) {
    const auto stack = bench_scene();
    const auto config = bench_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(run_pipeline(stack, config));
}

void BM_PipelineReference(benchmark::State& state) {
    const auto stack = bench_scene();
    const auto config = bench_config();
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::run_pipeline(stack, config));
}

} // namespace

BENCHMARK(BM_DictionaryParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DictionaryReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResponseParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ResponseReference)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PipelineParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PipelineReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
