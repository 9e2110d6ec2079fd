// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "splat360/camera.hpp"
#include "splat360/image.hpp"
#include "splat360/scene.hpp"

namespace splat360 {

struct MlpParams;

struct RenderConfig {
    double termination_epsilon = 1e-3; // stop once transmittance drops below this
    double cutoff_sigma = 3.0;         // Mahalanobis cutoff at closest approach
    bool disentangle = true;           // false: f = 1, l_aniso folded into l_iso
    bool anisotropy_enabled = true;    // false: f = 0

    void validate() const;
};

struct RaySample {
    std::size_t index = 0; // primitive index in the scene
    double t = 0.0;
    double weight = 0.0;
    double transmittance_before = 1.0;
};

struct GaussianHit {
    double t_star = 0.0;
    double weight = 0.0;
};

/// Peak of the primitive along the ray and its splat weight. The weight is
/// zero when the peak lies before near or beyond cutoff_sigma.
GaussianHit ray_gaussian_weight(const GaussianPrimitive& p, const Ray& r, double near = 0.0,
                                double cutoff_sigma = 3.0);

struct RayResult {
    Vec3 color = Vec3::Zero();
    Vec3 iso_sum = Vec3::Zero();   // sum T w l_iso + final_T * background
    Vec3 aniso_sum = Vec3::Zero(); // sum T w f l_aniso
    double depth = 0.0;
    double final_T = 1.0;
    std::vector<RaySample> samples;
};

/// Front-to-back compositing of every primitive the ray meets.
RayResult composite_ray(const Scene& scene, const Ray& r, const RenderConfig& cfg, double near = 0.0);

struct ExecPolicy {
    int workers = 1;
    int tile_size = 16;
};

struct RenderOutput {
    ImageBuffer color;
    ImageBuffer depth;
    ImageBuffer transmittance;
};

/// Renders one view. With fusion != nullptr the per-ray (iso, aniso) sums are
/// passed through the fusion MLP and its output replaces the physical color.
RenderOutput render(const Scene& scene, const Camera& cam, const RenderConfig& cfg,
                    const ExecPolicy& exec = {}, const MlpParams* fusion = nullptr);

} // namespace splat360
