// SPDX-License-Identifier: Apache-2.0

#include "splat360/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

namespace splat360 {

Mat3 random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q.toRotationMatrix();
}

Vec3 random_unit_vector(Rng& rng) {
    Vec3 v;
    do {
        v = Vec3(rng.normal(), rng.normal(), rng.normal());
    } while (v.norm() < 1e-12);
    return v.normalized();
}

GaussianPrimitive random_primitive(Rng& rng, const PrimitiveRanges& r) {
    GaussianPrimitive p;
    p.mu = random_unit_vector(rng) * r.position_radius * std::cbrt(rng.uniform());
    const Mat3 rot = random_rotation(rng);
    const Vec3 s(rng.uniform(r.scale_min, r.scale_max), rng.uniform(r.scale_min, r.scale_max),
                 rng.uniform(r.scale_min, r.scale_max));
    const Mat3 cov = rot * s.cwiseProduct(s).asDiagonal() * rot.transpose();
    p.cov = 0.5 * (cov + cov.transpose());
    p.alpha = rng.uniform(r.alpha_min, r.alpha_max);
    for (int c = 0; c < 3; ++c) {
        p.l_iso[c] = rng.uniform(r.iso_min, r.iso_max);
        p.l_aniso[c] = rng.uniform(0.0, r.aniso_max);
    }
    p.normal = random_unit_vector(rng);
    p.g = rng.uniform(-r.g_max, r.g_max);
    return p;
}

Scene random_scene(std::size_t n, std::uint64_t seed, const PrimitiveRanges& ranges, const Vec3& background) {
    Rng rng(seed);
    std::vector<GaussianPrimitive> gs;
    gs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) gs.push_back(random_primitive(rng, ranges));
    return Scene(std::move(gs), background);
}

Scene toy_recovery_scene(std::uint64_t seed) {
    PrimitiveRanges r;
    r.position_radius = 0.8;
    r.scale_min = 0.12;
    r.scale_max = 0.3;
    r.alpha_min = 0.4;
    r.alpha_max = 0.9;
    r.iso_min = 0.15;
    r.iso_max = 0.85;
    r.aniso_max = 0.4;
    r.g_max = 0.7;
    return random_scene(20, seed, r);
}

Scene perturb_appearance(const Scene& scene, double fraction, std::uint64_t seed) {
    Rng rng(seed);
    auto factor = [&] { return 1.0 + rng.uniform(-fraction, fraction); };
    auto gs = scene.gaussians();
    for (auto& p : gs) {
        p.alpha = std::clamp(p.alpha * factor(), 1e-3, 1.0);
        for (int c = 0; c < 3; ++c) {
            p.l_iso[c] = std::clamp(p.l_iso[c] * factor(), 0.0, 1.0);
            p.l_aniso[c] = std::max(0.0, p.l_aniso[c] * factor());
        }
        p.g = std::clamp(p.g * factor(), -0.95, 0.95);
    }
    return Scene(std::move(gs), scene.background());
}

Scene benchmark_scene(std::size_t n, std::uint64_t seed) {
    PrimitiveRanges r;
    r.position_radius = 1.0;
    r.scale_min = 0.01;
    r.scale_max = 0.05;
    return random_scene(n, seed, r);
}

VoxelVolume water_sphere_phantom(int n, double spacing_mm, double radius_mm) {
    const Vec3 spacing = Vec3::Constant(spacing_mm);
    // Grid centered on the world origin.
    const Vec3 origin = Vec3::Constant(-0.5 * (n - 1) * spacing_mm);
    auto vol = VoxelVolume::filled({n, n, n}, spacing, origin, kAirHu);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (vol.voxel_center(i, j, k).norm() <= radius_mm) vol.at(i, j, k) = 0.0;
            }
        }
    }
    return vol;
}

} // namespace splat360
