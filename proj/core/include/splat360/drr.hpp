// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splat360/image.hpp"
#include "splat360/volume.hpp"

namespace splat360 {

enum class DrrOutput { intensity, line_integral };

struct DrrConfig {
    double mu_water = 0.02; // 1/mm
    double i0 = 1.0;
    double step_mm = 0.0;   // <= 0 selects min(spacing) / 4
    DrrOutput output = DrrOutput::intensity;

    double resolved_step(const VoxelVolume& vol) const;
    void validate() const;
};

/// Cone-beam source/detector pair. Pixel (row, col) is centered at
/// detector_center + (col + 0.5 - W/2) u + (row + 0.5 - H/2) v.
struct ProjectionGeometry {
    Vec3 source = Vec3::Zero();
    Vec3 detector_center = Vec3::Zero();
    Vec3 detector_u = Vec3::UnitX(); // mm / pixel
    Vec3 detector_v = Vec3::UnitY(); // mm / pixel
    int det_width = 1;
    int det_height = 1;

    /// Source and detector on opposite sides of the isocenter in the xy plane,
    /// the source at azimuth angle (radians) and distance sid from the isocenter.
    static ProjectionGeometry cone_beam(const Vec3& isocenter, double sid, double sdd, double angle,
                                        int det_width, int det_height, double pixel_mm);

    Vec3 pixel_center(int row, int col) const;
    Ray pixel_ray(int row, int col) const;
    void validate() const;
};

struct BeerLambertResult {
    double intensity = 0.0;
    double line_integral = 0.0;
};

/// Slab clipping against an axis-aligned box; false when the ray misses it
/// or the overlap lies entirely behind the origin.
bool clip_ray(const Ray& r, const Aabb& box, double& t_enter, double& t_exit);

/// Midpoint-rule integral of mu along r over [t0, t1] with the given number of equal steps.
double line_integral_segment(const VoxelVolume& vol, const Ray& r, double t0, double t1, int steps,
                             double mu_water);

/// Beer-Lambert attenuation of one ray through the volume box.
BeerLambertResult beer_lambert_ray(const VoxelVolume& vol, const Ray& r, const DrrConfig& cfg);

/// One Beer-Lambert ray per detector pixel; single-channel output.
ImageBuffer render_drr(const VoxelVolume& vol, const ProjectionGeometry& geom, const DrrConfig& cfg,
                       int workers = 1);

} // namespace splat360
