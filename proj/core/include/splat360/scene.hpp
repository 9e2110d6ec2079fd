// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "splat360/types.hpp"

namespace splat360 {

struct GaussianPrimitive {
    Vec3 mu = Vec3::Zero();
    Mat3 cov = Mat3::Identity();     // symmetric positive definite
    double alpha = 1.0;              // (0, 1]
    Vec3 l_iso = Vec3::Zero();       // linear radiance, [0, 1]
    Vec3 l_aniso = Vec3::Zero();     // linear radiance, >= 0
    Vec3 normal = Vec3::UnitZ();     // unit
    double g = 0.0;                  // phase asymmetry, (-1, 1)
};

/// Evaluates alpha * exp(-0.5 (x - mu)^T cov^-1 (x - mu)).
/// Throws InvalidPrimitiveError if the covariance is singular.
double eval_gaussian(const GaussianPrimitive& p, const Vec3& x);

struct Violation {
    std::size_t index = 0;
    std::string rule;
};

/// Checks the invariants of a single primitive; returns the failed rule names.
std::vector<std::string> check_primitive(const GaussianPrimitive& p);

/// An ordered list of primitives plus background radiance. Bounds and the
/// bounding sphere are derived and kept in sync with the primitive list.
class Scene {
public:
    Scene() = default;
    explicit Scene(std::vector<GaussianPrimitive> gaussians, Vec3 background = Vec3::Zero());

    const std::vector<GaussianPrimitive>& gaussians() const { return gaussians_; }
    const Vec3& background() const { return background_; }
    const Aabb& bounds() const { return bounds_; }
    const Vec3& center() const { return center_; }
    double radius() const { return radius_; }
    std::size_t size() const { return gaussians_.size(); }
    bool empty() const { return gaussians_.empty(); }

    void set_gaussians(std::vector<GaussianPrimitive> gaussians);
    void set_background(const Vec3& background) { background_ = background; }

private:
    void recompute_bounds();

    std::vector<GaussianPrimitive> gaussians_;
    Vec3 background_ = Vec3::Zero();
    Aabb bounds_;
    Vec3 center_ = Vec3::Zero();
    double radius_ = 1.0;
};

/// Empty iff every primitive satisfies its invariants.
std::vector<Violation> validate_scene(const Scene& s);

} // namespace splat360
