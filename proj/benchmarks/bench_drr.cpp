// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "splat360/drr.hpp"
#include "splat360/synthetic.hpp"

using namespace splat360;

static void BM_Drr(benchmark::State& state) {
    const VoxelVolume vol = water_sphere_phantom(static_cast<int>(state.range(0)), 1.5, 30.0);
    const int det = static_cast<int>(state.range(1));
    const auto geom = ProjectionGeometry::cone_beam(vol.center(), 500, 1000, 0.3, det, det, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(render_drr(vol, geom, DrrConfig{}, 1));
    state.SetItemsProcessed(state.iterations() * det * det);
}
BENCHMARK(BM_Drr)->Args({64, 64})->Args({64, 128})->Unit(benchmark::kMillisecond);
