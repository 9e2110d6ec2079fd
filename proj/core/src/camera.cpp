// SPDX-License-Identifier: Apache-2.0

#include "splat360/camera.hpp"

#include <cmath>

#include "splat360/error.hpp"

namespace splat360 {

Camera Camera::look_at(const Vec3& position, const Vec3& target, const Vec3& world_up, double fov_y,
                       int width, int height, double near) {
    Camera cam;
    cam.position = position;
    cam.fov_y = fov_y;
    cam.width = width;
    cam.height = height;
    cam.near = near;
    const Vec3 to_target = target - position;
    if (!(to_target.norm() > 0.0)) throw ArgumentError("look_at: position coincides with target");
    cam.forward = to_target.normalized();
    Vec3 hint = world_up.normalized();
    if (std::abs(cam.forward.dot(hint)) > 0.999) {
        hint = std::abs(cam.forward.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    }
    cam.right = cam.forward.cross(hint).normalized();
    cam.up = cam.right.cross(cam.forward).normalized();
    return cam;
}

Ray Camera::ray_through(double x, double y) const {
    const double tan_half = std::tan(0.5 * fov_y);
    const double aspect = static_cast<double>(width) / height;
    const double sx = (2.0 * x / width - 1.0) * tan_half * aspect;
    const double sy = (1.0 - 2.0 * y / height) * tan_half;
    Ray r;
    r.origin = position;
    r.dir = (forward + sx * right + sy * up).normalized();
    return r;
}

double Camera::project(const Vec3& p, double& x, double& y) const {
    const Vec3 d = p - position;
    const double z = d.dot(forward);
    const double tan_half = std::tan(0.5 * fov_y);
    const double aspect = static_cast<double>(width) / height;
    const double sx = d.dot(right) / z;
    const double sy = d.dot(up) / z;
    x = 0.5 * width * (sx / (tan_half * aspect) + 1.0);
    y = 0.5 * height * (1.0 - sy / tan_half);
    return z;
}

void Camera::validate() const {
    constexpr double tol = 1e-9;
    if (width < 1 || height < 1) throw ArgumentError("camera dimensions must be positive");
    if (!(fov_y > 0.0 && fov_y < kPi)) throw ArgumentError("camera fov_y must lie in (0, pi)");
    if (!(near > 0.0)) throw ArgumentError("camera near must be positive");
    if (!position.allFinite()) throw ArgumentError("camera position is not finite");
    const bool unit = std::abs(forward.norm() - 1.0) < tol && std::abs(up.norm() - 1.0) < tol &&
                      std::abs(right.norm() - 1.0) < tol;
    const bool ortho = std::abs(forward.dot(up)) < tol && std::abs(forward.dot(right)) < tol &&
                       std::abs(up.dot(right)) < tol;
    if (!unit || !ortho) throw ArgumentError("camera frame is not orthonormal");
    if ((forward.cross(up) - right).norm() > 1e-8) {
        throw ArgumentError("camera frame must satisfy right = forward x up");
    }
}

std::vector<Camera> make_orbit_cameras(const Vec3& center, double radius, int n, double elevation,
                                       OrbitMode mode, int width, int height, double fov_y) {
    if (n < 1) throw ArgumentError("make_orbit_cameras: n must be >= 1");
    if (!(radius > 0.0)) throw ArgumentError("make_orbit_cameras: radius must be positive");
    std::vector<Camera> cams;
    cams.reserve(n);
    const Vec3 world_up = Vec3::UnitY();
    for (int k = 0; k < n; ++k) {
        Vec3 dir;
        if (mode == OrbitMode::ring) {
            const double az = 2.0 * kPi * k / n;
            dir = Vec3(std::cos(elevation) * std::cos(az), std::sin(elevation),
                       std::cos(elevation) * std::sin(az));
        } else {
            // Fibonacci lattice: y uniform in (-1, 1), azimuth advanced by the golden angle.
            const double golden = kPi * (3.0 - std::sqrt(5.0));
            const double y = 1.0 - 2.0 * (k + 0.5) / n;
            const double ring = std::sqrt(std::max(0.0, 1.0 - y * y));
            const double az = golden * k;
            dir = Vec3(ring * std::cos(az), y, ring * std::sin(az));
        }
        cams.push_back(Camera::look_at(center + radius * dir, center, world_up, fov_y, width, height));
    }
    return cams;
}

} // namespace splat360
