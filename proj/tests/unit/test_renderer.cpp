// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "splat360/error.hpp"
#include "splat360/random.hpp"
#include "splat360/renderer.hpp"
#include "splat360/synthetic.hpp"

using namespace splat360;

namespace {

GaussianPrimitive blob(const Vec3& mu, double sigma, double alpha, const Vec3& iso) {
    GaussianPrimitive p;
    p.mu = mu;
    p.cov = Mat3::Identity() * sigma * sigma;
    p.alpha = alpha;
    p.l_iso = iso;
    return p;
}

double hg_factor(double mu, double g) {
    return (1 - g * g) / std::pow(1 + g * g - 2 * g * mu, 1.5);
}

// Peak of alpha * exp(-0.5 q(t)) along the ray by golden-section search.
double brute_force_weight(const GaussianPrimitive& p, const Ray& r) {
    const Mat3 inv = p.cov.inverse();
    auto q = [&](double t) {
        const Vec3 m = r.origin + t * r.dir - p.mu;
        return m.dot(inv * m);
    };
    double a = 0.0;
    double b = 100.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double c = b - phi * (b - a);
        const double d = a + phi * (b - a);
        if (q(c) < q(d)) b = d;
        else a = c;
    }
    return p.alpha * std::exp(-0.5 * q(0.5 * (a + b)));
}

Camera test_camera(int size = 24) {
    return Camera::look_at(Vec3(0.3, 0.4, 3.0), Vec3::Zero(), Vec3::UnitY(), 0.9, size, size, 1e-3);
}

} // namespace

TEST(RayGaussianWeight, IsotropicOffsetRay) {
    const auto p = blob(Vec3::Zero(), 0.5, 0.8, Vec3::Zero());
    const Ray r{Vec3(0.3, 0.0, -4.0), Vec3::UnitZ()};
    const auto hit = ray_gaussian_weight(p, r);
    EXPECT_NEAR(hit.t_star, 4.0, 1e-12);
    EXPECT_NEAR(hit.weight, 0.8 * std::exp(-0.5 * 0.09 / 0.25), 1e-14);
}

TEST(RayGaussianWeight, AnisotropicMatchesLineSearch) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        GaussianPrimitive p;
        const Mat3 rot = random_rotation(rng);
        p.cov = rot * Vec3(rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)).asDiagonal() *
                rot.transpose();
        p.alpha = rng.uniform(0.2, 1.0);
        p.mu = Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
        const Ray r{Vec3(0, 0, -5), (Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), 1.0)).normalized()};
        const auto hit = ray_gaussian_weight(p, r, 0.0, 1e9);
        EXPECT_NEAR(hit.weight, brute_force_weight(p, r), 1e-9);
    }
}

TEST(RayGaussianWeight, CutoffAndNearPlane) {
    const auto p = blob(Vec3::Zero(), 0.1, 1.0, Vec3::Zero());
    EXPECT_EQ(ray_gaussian_weight(p, {Vec3(0.31, 0, -1), Vec3::UnitZ()}).weight, 0.0);
    EXPECT_GT(ray_gaussian_weight(p, {Vec3(0.29, 0, -1), Vec3::UnitZ()}).weight, 0.0);
    EXPECT_EQ(ray_gaussian_weight(p, {Vec3(0, 0, 1), Vec3::UnitZ()}).weight, 0.0);
    EXPECT_EQ(ray_gaussian_weight(p, {Vec3(0, 0, -1), Vec3::UnitZ()}, 2.0).weight, 0.0);
}

TEST(CompositeRay, SinglePrimitiveClosedForm) {
    auto p = blob(Vec3::Zero(), 0.4, 0.6, Vec3(0.2, 0.5, 0.9));
    p.l_aniso = Vec3(0.3, 0.1, 0.0);
    p.normal = Vec3(0, 0.6, -0.8);
    p.g = 0.4;
    const Vec3 bg(0.1, 0.2, 0.3);
    const Scene scene({p}, bg);
    const Ray r{Vec3(0.1, 0.0, -3.0), Vec3::UnitZ()};
    const auto res = composite_ray(scene, r, RenderConfig{});
    const double w = 0.6 * std::exp(-0.5 * 0.01 / 0.16);
    const double f = hg_factor(r.dir.dot(p.normal), p.g);
    const Vec3 expected = w * (p.l_iso + f * p.l_aniso) + (1 - w) * bg;
    EXPECT_NEAR((res.color - expected).norm(), 0.0, 1e-14);
    EXPECT_NEAR(res.final_T, 1 - w, 1e-15);
    EXPECT_NEAR(res.depth, 3.0, 1e-12);
}

TEST(CompositeRay, FrontToBackOrder) {
    const Vec3 red(1, 0, 0), blue(0, 0, 1);
    const Scene scene({blob(Vec3(0, 0, 1), 0.2, 0.5, blue), blob(Vec3(0, 0, -1), 0.2, 0.5, red)});
    const auto res = composite_ray(scene, {Vec3(0, 0, -5), Vec3::UnitZ()}, RenderConfig{});
    ASSERT_EQ(res.samples.size(), 2u);
    EXPECT_NEAR(res.color.x(), 0.5, 1e-14);
    EXPECT_NEAR(res.color.z(), 0.25, 1e-14);
    EXPECT_NEAR(res.depth, (0.5 * 4 + 0.25 * 6) / 0.75, 1e-12);
}

TEST(CompositeRay, ConservationOnRandomScenes) {
    Rng rng(5);
    for (int s = 0; s < 20; ++s) {
        const Scene scene = random_scene(30, 100 + s);
        for (int i = 0; i < 50; ++i) {
            const Vec3 origin = 4.0 * random_unit_vector(rng);
            const Vec3 target(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
            const auto res = composite_ray(scene, {origin, (target - origin).normalized()}, RenderConfig{});
            double sum = res.final_T;
            for (const auto& smp : res.samples) sum += smp.transmittance_before * smp.weight;
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(CompositeRay, EarlyTermination) {
    std::vector<GaussianPrimitive> gs;
    for (int i = 0; i < 10; ++i) gs.push_back(blob(Vec3(0, 0, i * 0.5), 0.1, 1.0, Vec3(0.5, 0.5, 0.5)));
    const Scene scene(gs);
    RenderConfig cfg;
    const auto res = composite_ray(scene, {Vec3(0, 0, -2), Vec3::UnitZ()}, cfg);
    EXPECT_EQ(res.samples.size(), 1u);
    EXPECT_EQ(res.final_T, 0.0);
}

TEST(CompositeRay, DisentangleEquivalences) {
    Rng rng(9);
    Scene scene = random_scene(15, 42);
    for (int i = 0; i < 30; ++i) {
        const Vec3 origin = 4.0 * random_unit_vector(rng);
        const Ray r{origin, (-origin).normalized()};

        RenderConfig off;
        off.anisotropy_enabled = false;
        auto no_aniso = scene.gaussians();
        for (auto& p : no_aniso) p.l_aniso.setZero();
        EXPECT_NEAR((composite_ray(scene, r, off).color - composite_ray(Scene(no_aniso, scene.background()), r, {}).color)
                        .norm(),
                    0.0, 1e-12);

        auto g0 = scene.gaussians();
        auto folded = scene.gaussians();
        for (std::size_t k = 0; k < g0.size(); ++k) {
            g0[k].g = 0.0;
            folded[k].g = 0.0;
            folded[k].l_iso += folded[k].l_aniso;
            folded[k].l_aniso.setZero();
        }
        EXPECT_NEAR((composite_ray(Scene(g0, scene.background()), r, {}).color -
                     composite_ray(Scene(folded, scene.background()), r, {}).color)
                        .norm(),
                    0.0, 1e-12);

        RenderConfig entangled;
        entangled.disentangle = false;
        EXPECT_NEAR((composite_ray(scene, r, entangled).color -
                     composite_ray(Scene(g0, scene.background()), r, {}).color)
                        .norm(),
                    0.0, 1e-12);
    }
}

TEST(Render, EmptySceneIsBackground) {
    const Vec3 bg(0.2, 0.4, 0.6);
    const auto out = render(Scene({}, bg), test_camera(8), RenderConfig{});
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(out.color.at(r, c, ch), bg[ch]);
            EXPECT_EQ(out.transmittance.at(r, c), 1.0);
        }
    }
}

TEST(Render, MatchesPerRayCompositing) {
    const Scene scene = random_scene(25, 17);
    const Camera cam = test_camera(20);
    const auto out = render(scene, cam, RenderConfig{});
    for (int r = 0; r < cam.height; r += 3) {
        for (int c = 0; c < cam.width; c += 3) {
            const auto ray = composite_ray(scene, cam.pixel_ray(r, c), RenderConfig{}, cam.near);
            for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(out.color.at(r, c, ch), ray.color[ch], 1e-12);
            EXPECT_NEAR(out.transmittance.at(r, c), ray.final_T, 1e-12);
        }
    }
}

TEST(Render, InvariantToPrimitiveOrder) {
    const Scene scene = random_scene(40, 23);
    auto shuffled = scene.gaussians();
    std::mt19937_64 gen(3);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const Camera cam = test_camera();
    const auto a = render(scene, cam, RenderConfig{});
    const auto b = render(Scene(shuffled, scene.background()), cam, RenderConfig{});
    EXPECT_TRUE(a.color == b.color);
    EXPECT_TRUE(a.depth == b.depth);
}

TEST(Render, IndependentOfWorkersAndTileSize) {
    const Scene scene = random_scene(60, 31);
    const Camera cam = test_camera(37);
    const auto ref = render(scene, cam, RenderConfig{}, ExecPolicy{1, 16});
    for (int workers : {2, 3, 8}) {
        for (int tile : {4, 16, 64}) {
            const auto out = render(scene, cam, RenderConfig{}, ExecPolicy{workers, tile});
            EXPECT_TRUE(out.color == ref.color) << workers << " workers, tile " << tile;
            EXPECT_TRUE(out.depth == ref.depth);
            EXPECT_TRUE(out.transmittance == ref.transmittance);
        }
    }
}

TEST(Render, RejectsSingularCovariance) {
    auto p = blob(Vec3::Zero(), 0.2, 0.5, Vec3::Zero());
    p.cov(2, 2) = 0.0;
    EXPECT_THROW(render(Scene({p}), test_camera(8), RenderConfig{}), InvalidPrimitiveError);
}

TEST(RenderConfig, ValidateRejectsBadValues) {
    RenderConfig cfg;
    cfg.termination_epsilon = -1.0;
    EXPECT_THROW(cfg.validate(), ArgumentError);
    cfg = {};
    cfg.cutoff_sigma = 0.0;
    EXPECT_THROW(cfg.validate(), ArgumentError);
}
