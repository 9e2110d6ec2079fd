// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "splat360/random.hpp"
#include "splat360/renderer.hpp"
#include "splat360/synthetic.hpp"

using namespace splat360;

static void BM_RenderFrame(benchmark::State& state) {
    const Scene scene = benchmark_scene(static_cast<std::size_t>(state.range(0)));
    const int res = static_cast<int>(state.range(1));
    const Camera cam =
        make_orbit_cameras(scene.center(), 2.5 * scene.radius(), 1, 0.35, OrbitMode::ring, res, res, 0.87).front();
    const ExecPolicy exec{static_cast<int>(state.range(2)), 16};
    for (auto _ : state) benchmark::DoNotOptimize(render(scene, cam, RenderConfig{}, exec));
    state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(BM_RenderFrame)
    ->Args({1000, 128, 1})
    ->Args({5000, 256, 1})
    ->Args({5000, 512, 1})
    ->Args({5000, 512, 8})
    ->Unit(benchmark::kMillisecond);

static void BM_CompositeRay(benchmark::State& state) {
    const Scene scene = random_scene(static_cast<std::size_t>(state.range(0)), 11);
    Rng rng(5);
    std::vector<Ray> rays;
    for (int i = 0; i < 256; ++i) {
        const Vec3 o = 4.0 * random_unit_vector(rng);
        rays.push_back({o, (-o).normalized()});
    }
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(composite_ray(scene, rays[i++ % rays.size()], RenderConfig{}));
}
BENCHMARK(BM_CompositeRay)->Arg(16)->Arg(256)->Arg(4096);

BENCHMARK_MAIN();
