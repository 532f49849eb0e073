#include <benchmark/benchmark.h>

#include "mefgen/color.hpp"

#include "fixtures.hpp"

using namespace mefgen;

static void BM_SrgbEncode(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const LinearImage img = test::random_linear(side, side, 1, 2.0f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(srgb_encode(img));
    }
    state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_SrgbEncode)->Arg(256)->Arg(1024);

static void BM_SrgbDecode(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const SrgbImage img = test::random_srgb(side, side, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(srgb_decode(img));
    }
    state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_SrgbDecode)->Arg(256)->Arg(1024);

static void BM_MeanIntensity(benchmark::State& state) {
    const SrgbImage img = test::random_srgb(1024, 1024, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean_intensity(img));
    }
    state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_MeanIntensity);
