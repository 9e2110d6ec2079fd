// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "splat360/types.hpp"

namespace splat360 {

/// Pinhole camera. The frame convention is right = forward x up; image rows
/// run top to bottom along -up, columns left to right along +right.
struct Camera {
    Vec3 position = Vec3::Zero();
    Vec3 forward = -Vec3::UnitZ();
    Vec3 up = Vec3::UnitY();
    Vec3 right = Vec3::UnitX();
    double fov_y = kPi / 3.0;
    int width = 64;
    int height = 64;
    double near = 1e-3;

    /// Builds an orthonormal frame looking from position at target.
    /// world_up is replaced by another axis when nearly parallel to the view.
    static Camera look_at(const Vec3& position, const Vec3& target, const Vec3& world_up,
                          double fov_y, int width, int height, double near = 1e-3);

    /// Ray through continuous image coordinates (x along columns, y along rows).
    Ray ray_through(double x, double y) const;
    /// Ray through the center of pixel (row, col).
    Ray pixel_ray(int row, int col) const { return ray_through(col + 0.5, row + 0.5); }

    /// Projects a world point to continuous image coordinates; returns the
    /// camera-space depth along forward.
    double project(const Vec3& p, double& x, double& y) const;

    /// Throws ArgumentError when the frame or intrinsics are invalid.
    void validate() const;
};

enum class OrbitMode { ring, fibonacci_sphere };

std::vector<Camera> make_orbit_cameras(const Vec3& center, double radius, int n, double elevation,
                                       OrbitMode mode, int width, int height, double fov_y);

} // namespace splat360
