#include <benchmark/benchmark.h>

#include "mefgen/pyramid.hpp"

#include "fixtures.hpp"

using namespace mefgen;

static void BM_LaplacianBuild(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const GrayImage img = test::random_gray(side, side, 7);
    const int depth = default_pyramid_depth(side, side);
    for (auto _ : state) {
        benchmark::DoNotOptimize(laplacian_pyramid(img, depth));
    }
    state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_LaplacianBuild)->Arg(256)->Arg(512)->Arg(1024);

static void BM_PyramidRoundTrip(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const GrayImage img = test::random_gray(side, side, 9);
    const int depth = default_pyramid_depth(side, side);
    for (auto _ : state) {
        benchmark::DoNotOptimize(collapse(laplacian_pyramid(img, depth)));
    }
    state.SetItemsProcessed(state.iterations() * img.pixel_count());
}
BENCHMARK(BM_PyramidRoundTrip)->Arg(512);
