// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "splat360/camera.hpp"
#include "splat360/error.hpp"

using namespace splat360;

TEST(Camera, CentralPixelLooksForward) {
    const Camera cam = Camera::look_at(Vec3(0, 0, 5), Vec3::Zero(), Vec3::UnitY(), 0.8, 33, 21, 1e-3);
    const Ray r = cam.pixel_ray(10, 16);
    EXPECT_NEAR((r.dir - Vec3(0, 0, -1)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(r.dir.norm(), 1.0, 1e-12);
}

TEST(Camera, ProjectInvertsPixelRay) {
    const Camera cam = Camera::look_at(Vec3(1, 2, 3), Vec3(0, 0.5, 0), Vec3::UnitY(), 0.9, 40, 30, 1e-3);
    const Ray r = cam.pixel_ray(7, 25);
    double x = 0.0;
    double y = 0.0;
    const double z = cam.project(r.origin + 4.0 * r.dir, x, y);
    EXPECT_GT(z, 0.0);
    EXPECT_NEAR(x, 25.5, 1e-9);
    EXPECT_NEAR(y, 7.5, 1e-9);
}

TEST(Camera, TopRowPointsUp) {
    const Camera cam = Camera::look_at(Vec3(0, 0, 5), Vec3::Zero(), Vec3::UnitY(), 0.8, 16, 16, 1e-3);
    EXPECT_GT(cam.pixel_ray(0, 8).dir.y(), 0.0);
    EXPECT_GT(cam.pixel_ray(8, 15).dir.x(), 0.0);
}

TEST(Camera, ValidateRejectsBadSize) {
    Camera cam;
    cam.width = 0;
    EXPECT_THROW(cam.validate(), ArgumentError);
}

TEST(OrbitCameras, RingIsEquidistantAndAimed) {
    const Vec3 c(0.5, -0.2, 1.0);
    const auto cams = make_orbit_cameras(c, 3.0, 8, 0.3, OrbitMode::ring, 32, 32, 0.8);
    ASSERT_EQ(cams.size(), 8u);
    for (const auto& cam : cams) {
        EXPECT_NEAR((cam.position - c).norm(), 3.0, 1e-12);
        EXPECT_NEAR((cam.forward - (c - cam.position).normalized()).norm(), 0.0, 1e-12);
        EXPECT_NEAR(cam.position.y() - c.y(), 3.0 * std::sin(0.3), 1e-12);
    }
    EXPECT_GT((cams[0].position - cams[1].position).norm(), 1e-3);
}

TEST(OrbitCameras, FibonacciCoversSphere) {
    const auto cams = make_orbit_cameras(Vec3::Zero(), 2.0, 20, 0.0, OrbitMode::fibonacci_sphere, 16, 16, 0.8);
    ASSERT_EQ(cams.size(), 20u);
    Vec3 mean = Vec3::Zero();
    for (const auto& cam : cams) {
        EXPECT_NEAR(cam.position.norm(), 2.0, 1e-12);
        EXPECT_NO_THROW(cam.validate());
        mean += cam.position / 20.0;
    }
    EXPECT_LT(mean.norm(), 0.3);
}
