// SPDX-License-Identifier: Apache-2.0

#include "splat360/drr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splat360/error.hpp"
#include "splat360/parallel.hpp"

namespace splat360 {

double DrrConfig::resolved_step(const VoxelVolume& vol) const {
    return step_mm > 0.0 ? step_mm : vol.spacing.minCoeff() / 4.0;
}

void DrrConfig::validate() const {
    if (!(mu_water > 0.0)) throw ArgumentError("mu_water must be positive");
    if (!(i0 > 0.0)) throw ArgumentError("i0 must be positive");
    if (!(step_mm >= 0.0)) throw ArgumentError("step_mm must be positive");
}

ProjectionGeometry ProjectionGeometry::cone_beam(const Vec3& isocenter, double sid, double sdd,
                                                 double angle, int det_width, int det_height,
                                                 double pixel_mm) {
    if (!(sid > 0.0) || !(sdd > sid)) throw ArgumentError("cone beam requires 0 < sid < sdd");
    if (!(pixel_mm > 0.0)) throw ArgumentError("detector pixel size must be positive");
    const Vec3 axis(std::cos(angle), std::sin(angle), 0.0);
    ProjectionGeometry g;
    g.source = isocenter + sid * axis;
    g.detector_center = isocenter - (sdd - sid) * axis;
    g.detector_u = pixel_mm * Vec3(-std::sin(angle), std::cos(angle), 0.0);
    g.detector_v = pixel_mm * Vec3(0.0, 0.0, -1.0);
    g.det_width = det_width;
    g.det_height = det_height;
    return g;
}

Vec3 ProjectionGeometry::pixel_center(int row, int col) const {
    return detector_center + (col + 0.5 - 0.5 * det_width) * detector_u +
           (row + 0.5 - 0.5 * det_height) * detector_v;
}

Ray ProjectionGeometry::pixel_ray(int row, int col) const {
    Ray r;
    r.origin = source;
    r.dir = (pixel_center(row, col) - source).normalized();
    return r;
}

void ProjectionGeometry::validate() const {
    if (det_width < 1 || det_height < 1) throw ArgumentError("detector dimensions must be positive");
    const double nu = detector_u.norm();
    const double nv = detector_v.norm();
    if (!(nu > 0.0) || !(nv > 0.0)) throw ArgumentError("detector axes must be non-zero");
    if (std::abs(detector_u.dot(detector_v)) > 1e-9 * nu * nv) {
        throw ArgumentError("detector_u and detector_v must be orthogonal");
    }
    const Vec3 normal = detector_u.cross(detector_v).normalized();
    if (std::abs(normal.dot(source - detector_center)) < 1e-9) {
        throw ArgumentError("source lies on the detector plane");
    }
}

bool clip_ray(const Ray& r, const Aabb& box, double& t_enter, double& t_exit) {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (r.dir[a] == 0.0) {
            if (r.origin[a] < box.lo[a] || r.origin[a] > box.hi[a]) return false;
            continue;
        }
        const double inv = 1.0 / r.dir[a];
        double t0 = (box.lo[a] - r.origin[a]) * inv;
        double t1 = (box.hi[a] - r.origin[a]) * inv;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    }
    t_enter = lo;
    t_exit = hi;
    return hi > lo;
}

double line_integral_segment(const VoxelVolume& vol, const Ray& r, double t0, double t1, int steps,
                             double mu_water) {
    if (steps < 1 || !(t1 > t0)) return 0.0;
    const double ds = (t1 - t0) / steps;
    double sum = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + (k + 0.5) * ds;
        sum += hu_to_mu(sample_hu(vol, r.origin + t * r.dir), mu_water);
    }
    return sum * ds;
}

BeerLambertResult beer_lambert_ray(const VoxelVolume& vol, const Ray& r, const DrrConfig& cfg) {
    BeerLambertResult out{cfg.i0, 0.0};
    double t0 = 0.0, t1 = 0.0;
    if (!clip_ray(r, vol.box(), t0, t1)) return out;
    const double step = cfg.resolved_step(vol);
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step - 1e-9)));
    out.line_integral = line_integral_segment(vol, r, t0, t1, steps, cfg.mu_water);
    out.intensity = cfg.i0 * std::exp(-out.line_integral);
    return out;
}

ImageBuffer render_drr(const VoxelVolume& vol, const ProjectionGeometry& geom, const DrrConfig& cfg,
                       int workers) {
    cfg.validate();
    geom.validate();
    const ImageKind kind =
        cfg.output == DrrOutput::intensity ? ImageKind::radiance : ImageKind::line_integral;
    ImageBuffer img(geom.det_width, geom.det_height, 1, kind);
    parallel_for(static_cast<std::size_t>(geom.det_height), resolve_workers(workers),
                 [&](std::size_t row) {
                     const int r = static_cast<int>(row);
                     for (int c = 0; c < geom.det_width; ++c) {
                         const auto res = beer_lambert_ray(vol, geom.pixel_ray(r, c), cfg);
                         img.at(r, c) = cfg.output == DrrOutput::intensity ? res.intensity
                                                                           : res.line_integral;
                     }
                 });
    return img;
}

} // namespace splat360
