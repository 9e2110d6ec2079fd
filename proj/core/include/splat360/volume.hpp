// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "splat360/types.hpp"

namespace splat360 {

inline constexpr double kAirHu = -1000.0;

/// Hounsfield-unit grid. Voxel (i, j, k) is centered at origin + (i, j, k) * spacing;
/// values are stored x-fastest.
struct VoxelVolume {
    std::array<int, 3> dims{1, 1, 1};
    Vec3 spacing = Vec3::Ones(); // mm / voxel
    Vec3 origin = Vec3::Zero();  // mm
    std::vector<double> hu;

    static VoxelVolume filled(std::array<int, 3> dims, const Vec3& spacing, const Vec3& origin,
                              double value);

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
    }
    double& at(int i, int j, int k) { return hu[index(i, j, k)]; }
    double at(int i, int j, int k) const { return hu[index(i, j, k)]; }
    Vec3 voxel_center(int i, int j, int k) const {
        return origin + Vec3(i, j, k).cwiseProduct(spacing);
    }

    /// Extent covered by the voxels (centers +- half a voxel).
    Aabb box() const;
    Vec3 center() const { return 0.5 * (box().lo + box().hi); }

    /// Throws ArgumentError on bad dims/spacing or HU values that are non-finite or below -1024.
    void validate() const;
};

/// mu_water * (1 + h / 1000), clamped below at zero.
double hu_to_mu(double h, double mu_water);

/// Trilinear interpolation of the HU grid; points outside box() read as air.
double sample_hu(const VoxelVolume& vol, const Vec3& x);

} // namespace splat360
