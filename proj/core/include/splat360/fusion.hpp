// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "splat360/camera.hpp"
#include "splat360/types.hpp"

namespace splat360 {

inline constexpr int kMinEmbeddingDim = 13;
inline constexpr int kDefaultEmbeddingDim = 16;

/// Normalized camera descriptor e_c. Layout: relative position / radius (3),
/// forward (3), up (3), right (3), fov_y / pi (1), zero padding up to d.
struct CameraEmbedding {
    std::vector<double> vec;
    int d() const { return static_cast<int>(vec.size()); }
};

CameraEmbedding embed_camera(const Camera& cam, const Vec3& scene_center, double scene_radius,
                             int d = kDefaultEmbeddingDim);

struct DenseLayer {
    Eigen::MatrixXd weight; // out x in
    Eigen::VectorXd bias;   // out
};

/// Fusion MLP: [9 + d] -> 32 -> 32 -> 3, ReLU hidden, sigmoid output.
struct MlpParams {
    std::vector<DenseLayer> layers;
    int embed_dim = kDefaultEmbeddingDim;
    std::uint64_t seed = 0;

    /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
    static MlpParams init(int embed_dim, std::uint64_t seed);
    static MlpParams zeros(int embed_dim);

    int input_size() const { return 9 + embed_dim; }
    std::vector<int> layer_sizes() const;
    std::size_t parameter_count() const;

    /// Flattens as layer by layer, weight (row-major) then bias.
    std::vector<double> flat() const;
    void assign(std::span<const double> values);
    void set_zero();

    /// Throws ArgumentError on an inconsistent shape chain or non-finite values.
    void validate() const;
};

/// Concat(l_iso, l_aniso, e_c, dir).
Eigen::VectorXd fusion_input(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c,
                             const Vec3& dir);

Vec3 fuse(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c, const Vec3& dir,
          const MlpParams& params);
Vec3 fuse(const Eigen::VectorXd& input, const MlpParams& params);

struct FuseGradients {
    MlpParams param_grads;
    Eigen::VectorXd input_grad;
};

/// Reverse-mode gradients of upstream . fuse(input). ReLU'(0) is taken as 0.
FuseGradients fuse_backward(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c,
                            const Vec3& dir, const MlpParams& params, const Vec3& upstream_grad);

/// Same as fuse_backward but adds parameter gradients into accum (which must
/// share params' shape) and returns the input gradient.
Eigen::VectorXd fuse_backward_accumulate(const Eigen::VectorXd& input, const MlpParams& params,
                                         const Vec3& upstream_grad, MlpParams& accum);

} // namespace splat360
