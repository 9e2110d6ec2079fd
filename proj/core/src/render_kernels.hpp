// SPDX-License-Identifier: Apache-2.0

// Internal compositing kernels shared by the renderer and the fitting backward pass.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splat360/camera.hpp"
#include "splat360/renderer.hpp"
#include "splat360/scene.hpp"

namespace splat360::detail {

/// A primitive with its inverse covariance and origin-dependent terms cached.
struct PreparedGaussian {
    std::size_t source = 0; // index in the scene
    double a00, a01, a02, a11, a12, a22; // inverse covariance
    Vec3 b;    // A (mu - origin)
    double c0; // (mu - origin)^T A (mu - origin)
    double alpha;
    Vec3 l_iso;
    Vec3 l_aniso;
    Vec3 normal;
    double g;
    Vec3 mu;
    Vec3 half_extent; // axis-aligned half size of the cutoff ellipsoid
};

/// Primitives ordered by content (not by scene index) so that compositing is
/// invariant to the stored order, with terms cached for one ray origin.
class PreparedScene {
public:
    PreparedScene(const Scene& scene, const Vec3& origin, const RenderConfig& cfg);

    std::span<const PreparedGaussian> prims() const { return prims_; }
    const Vec3& background() const { return background_; }
    const Vec3& origin() const { return origin_; }

private:
    std::vector<PreparedGaussian> prims_;
    Vec3 background_;
    Vec3 origin_;
};

struct Sample {
    std::uint32_t prim; // index into PreparedScene::prims()
    double t;
    double w;
    double T;    // transmittance before this sample
    double k;    // d w / d alpha
    double f;    // anisotropy factor
    double dfdg; // d f / d g
};

struct Trace {
    Vec3 iso = Vec3::Zero();
    Vec3 aniso = Vec3::Zero();
    double depth = 0.0;
    double final_T = 1.0;
};

/// Composites the candidates (indices into prims, in rank order) along dir
/// from the prepared origin. samples receives the composited entries.
Trace trace_ray(const PreparedScene& ps, std::span<const std::uint32_t> candidates, const Vec3& dir,
                const RenderConfig& cfg, double near, std::vector<Sample>& samples);

/// Same as trace_ray over every primitive.
Trace trace_ray_all(const PreparedScene& ps, const Vec3& dir, const RenderConfig& cfg, double near,
                    std::vector<Sample>& samples);

// Per-primitive appearance gradient layout, indexed by scene index.
inline constexpr int kGradStride = 8;
inline constexpr int kGradAlpha = 0;
inline constexpr int kGradIso = 1;
inline constexpr int kGradAniso = 4;
inline constexpr int kGradG = 7;

/// Adds d(g_iso . iso + g_aniso . aniso)/d(appearance) into grad
/// (kGradStride entries per scene primitive).
void backprop_ray(const PreparedScene& ps, std::span<const Sample> samples, const Vec3& g_iso,
                  const Vec3& g_aniso, std::span<double> grad);

struct TileGrid {
    int tile = 16;
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<std::vector<std::uint32_t>> lists; // prepared indices, rank order

    std::span<const std::uint32_t> at(int row, int col) const {
        return lists[static_cast<std::size_t>(row / tile) * tiles_x + col / tile];
    }
};

/// Conservative screen-space binning of each primitive's cutoff box.
TileGrid bin_tiles(const PreparedScene& ps, const Camera& cam, int tile);

} // namespace splat360::detail
