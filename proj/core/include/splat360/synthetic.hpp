// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "splat360/random.hpp"
#include "splat360/scene.hpp"
#include "splat360/volume.hpp"

namespace splat360 {

/// Uniformly distributed rotation (from a random unit quaternion).
Mat3 random_rotation(Rng& rng);
Vec3 random_unit_vector(Rng& rng);

struct PrimitiveRanges {
    double position_radius = 1.0;
    double scale_min = 0.05;
    double scale_max = 0.25;
    double alpha_min = 0.3;
    double alpha_max = 0.95;
    double iso_min = 0.05;
    double iso_max = 0.95;
    double aniso_max = 0.4;
    double g_max = 0.7;
};

GaussianPrimitive random_primitive(Rng& rng, const PrimitiveRanges& ranges = {});
Scene random_scene(std::size_t n, std::uint64_t seed, const PrimitiveRanges& ranges = {},
                   const Vec3& background = Vec3(0.05, 0.05, 0.08));

/// 20 anisotropic primitives used by the recovery and ablation experiments.
Scene toy_recovery_scene(std::uint64_t seed = 2024);

/// Multiplies every appearance parameter by an independent factor in
/// [1 - fraction, 1 + fraction], then pulls it back into its valid range.
Scene perturb_appearance(const Scene& scene, double fraction, std::uint64_t seed);

/// Many small primitives for throughput measurements.
Scene benchmark_scene(std::size_t n = 5000, std::uint64_t seed = 5000);

/// n^3 water sphere (0 HU) in air (-1000 HU) centered in the grid.
VoxelVolume water_sphere_phantom(int n, double spacing_mm, double radius_mm);

} // namespace splat360
