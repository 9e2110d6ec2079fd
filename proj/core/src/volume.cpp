// SPDX-License-Identifier: Apache-2.0

#include "splat360/volume.hpp"

#include <algorithm>
#include <cmath>

#include "splat360/error.hpp"

namespace splat360 {

VoxelVolume VoxelVolume::filled(std::array<int, 3> dims, const Vec3& spacing, const Vec3& origin,
                                double value) {
    VoxelVolume v;
    v.dims = dims;
    v.spacing = spacing;
    v.origin = origin;
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw ArgumentError("volume dims must be >= 1");
    v.hu.assign(v.voxel_count(), value);
    return v;
}

Aabb VoxelVolume::box() const {
    const Vec3 n(dims[0], dims[1], dims[2]);
    return {origin - 0.5 * spacing, origin + (n - Vec3::Constant(0.5)).cwiseProduct(spacing)};
}

void VoxelVolume::validate() const {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw ArgumentError("volume dims must be >= 1");
    if (!(spacing.minCoeff() > 0.0) || !spacing.allFinite()) {
        throw ArgumentError("volume spacing must be positive");
    }
    if (!origin.allFinite()) throw ArgumentError("volume origin must be finite");
    if (hu.size() != voxel_count()) throw ArgumentError("volume data length does not match dims");
    for (double h : hu) {
        if (!std::isfinite(h) || h < -1024.0) {
            throw ArgumentError("volume HU values must be finite and >= -1024");
        }
    }
}

double hu_to_mu(double h, double mu_water) {
    return std::max(0.0, mu_water * (1.0 + h / 1000.0));
}

double sample_hu(const VoxelVolume& vol, const Vec3& x) {
    int base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (x[a] - vol.origin[a]) / vol.spacing[a];
        const int n = vol.dims[a];
        if (!(u >= -0.5 && u <= n - 0.5)) return kAirHu;
        const double clamped = std::clamp(u, 0.0, static_cast<double>(n - 1));
        int i = static_cast<int>(std::floor(clamped));
        if (i > n - 2) i = std::max(0, n - 2);
        base[a] = i;
        frac[a] = n > 1 ? clamped - i : 0.0;
    }
    // Nested lerps reproduce constant regions exactly.
    auto lerp = [](double a, double b, double t) { return a == b ? a : a + t * (b - a); };
    const int i1 = std::min(base[0] + 1, vol.dims[0] - 1);
    const int j1 = std::min(base[1] + 1, vol.dims[1] - 1);
    const int k1 = std::min(base[2] + 1, vol.dims[2] - 1);
    auto row = [&](int j, int k) { return lerp(vol.at(base[0], j, k), vol.at(i1, j, k), frac[0]); };
    const double z0 = lerp(row(base[1], base[2]), row(j1, base[2]), frac[1]);
    const double z1 = lerp(row(base[1], k1), row(j1, k1), frac[1]);
    return lerp(z0, z1, frac[2]);
}

} // namespace splat360
