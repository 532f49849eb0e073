#include <benchmark/benchmark.h>

#include "mefgen/color.hpp"
#include "mefgen/iqa.hpp"

#include "fixtures.hpp"

using namespace mefgen;

namespace {

GrayImage bench_gray(int side) {
    GrayImage g = luminance(test::scene_srgb(side, side, 13));
    for (float& v : g.data) {
        v *= 255.0f;
    }
    return g;
}

}  // namespace

static void BM_Mscn(benchmark::State& state) {
    const GrayImage gray = bench_gray(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mscn(gray));
    }
    state.SetItemsProcessed(state.iterations() * gray.pixel_count());
}
BENCHMARK(BM_Mscn)->Arg(256)->Arg(512);

static void BM_AggdFit(benchmark::State& state) {
    const auto samples = test::gaussian_samples(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_aggd(samples));
    }
    state.SetItemsProcessed(state.iterations() * samples.size());
}
BENCHMARK(BM_AggdFit)->Arg(10000)->Arg(1000000);

static void BM_NiqeFeatures(benchmark::State& state) {
    const GrayImage gray = bench_gray(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(niqe_features(gray, 96, 0.75));
    }
}
BENCHMARK(BM_NiqeFeatures)->Arg(480);

static void BM_BrisqueFeatures(benchmark::State& state) {
    const SrgbImage img = test::scene_srgb(static_cast<int>(state.range(0)),
                                           static_cast<int>(state.range(0)), 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(brisque_features(img));
    }
}
BENCHMARK(BM_BrisqueFeatures)->Arg(256)->Arg(512);
