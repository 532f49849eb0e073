#include <benchmark/benchmark.h>

#include "mefgen/fusion.hpp"

#include "fixtures.hpp"

using namespace mefgen;

namespace {

ExposureStack bench_stack(int side) {
    return render_mes(test::scene_linear(side, side, 11, 3.0f), {-2, 0, 2}, "bench");
}

}  // namespace

static void BM_MertensWeights(benchmark::State& state) {
    const ExposureStack stack = bench_stack(static_cast<int>(state.range(0)));
    const FusionConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mertens_weights(stack, cfg));
    }
    state.SetItemsProcessed(state.iterations() * stack.frames.front().pixel_count() * stack.size());
}
BENCHMARK(BM_MertensWeights)->Arg(256)->Arg(512);

static void BM_NormalizeWeights(benchmark::State& state) {
    const ExposureStack stack = bench_stack(static_cast<int>(state.range(0)));
    const FusionConfig cfg;
    const WeightMaps weights = mertens_weights(stack, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(normalize_weights(weights, cfg.epsilon));
    }
    state.SetItemsProcessed(state.iterations() * stack.frames.front().pixel_count() * stack.size());
}
BENCHMARK(BM_NormalizeWeights)->Arg(512);

static void BM_FusePyramid(benchmark::State& state) {
    const ExposureStack stack = bench_stack(static_cast<int>(state.range(0)));
    const FusionConfig cfg;
    const WeightMaps weights = normalize_weights(mertens_weights(stack, cfg), cfg.epsilon);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fuse_pyramid(stack, weights, 0));
    }
    state.SetItemsProcessed(state.iterations() * stack.frames.front().pixel_count());
}
BENCHMARK(BM_FusePyramid)->Arg(256)->Arg(512);

static void BM_EngineEndToEnd(benchmark::State& state) {
    const ExposureStack stack = bench_stack(512);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_engine(stack, "mertens", FusionConfig{}));
    }
    state.SetItemsProcessed(state.iterations() * stack.frames.front().pixel_count());
}
BENCHMARK(BM_EngineEndToEnd);
