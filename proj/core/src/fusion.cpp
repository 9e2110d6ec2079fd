// SPDX-License-Identifier: Apache-2.0

#include "splat360/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "splat360/error.hpp"
#include "splat360/random.hpp"

namespace splat360 {
namespace {

constexpr int kHidden = 32;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<int> shape_for(int embed_dim) { return {9 + embed_dim, kHidden, kHidden, 3}; }

MlpParams with_shape(int embed_dim) {
    if (embed_dim < kMinEmbeddingDim) {
        throw ArgumentError("embedding dimension must be >= " + std::to_string(kMinEmbeddingDim));
    }
    MlpParams p;
    p.embed_dim = embed_dim;
    const auto sizes = shape_for(embed_dim);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        p.layers.push_back({Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]),
                            Eigen::VectorXd::Zero(sizes[l + 1])});
    }
    return p;
}

void check_input(const Eigen::VectorXd& input, const MlpParams& params) {
    if (params.layers.empty() || input.size() != params.layers.front().weight.cols()) {
        throw ArgumentError("fuse: input size does not match the MLP input layer");
    }
}

} // namespace

CameraEmbedding embed_camera(const Camera& cam, const Vec3& scene_center, double scene_radius, int d) {
    if (d < kMinEmbeddingDim) {
        throw ArgumentError("embed_camera: d must be >= " + std::to_string(kMinEmbeddingDim));
    }
    if (!(scene_radius > 0.0)) throw ArgumentError("embed_camera: scene_radius must be positive");
    CameraEmbedding e;
    e.vec.assign(d, 0.0);
    const Vec3 rel = (cam.position - scene_center) / scene_radius;
    for (int i = 0; i < 3; ++i) {
        e.vec[i] = std::clamp(rel[i], -1.0, 1.0);
        e.vec[3 + i] = cam.forward[i];
        e.vec[6 + i] = cam.up[i];
        e.vec[9 + i] = cam.right[i];
    }
    e.vec[12] = cam.fov_y / kPi;
    return e;
}

MlpParams MlpParams::zeros(int embed_dim) { return with_shape(embed_dim); }

MlpParams MlpParams::init(int embed_dim, std::uint64_t seed) {
    MlpParams p = with_shape(embed_dim);
    p.seed = seed;
    Rng rng(seed);
    for (auto& layer : p.layers) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
                layer.weight(r, c) = rng.uniform(-limit, limit);
            }
        }
    }
    return p;
}

std::vector<int> MlpParams::layer_sizes() const {
    std::vector<int> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(static_cast<int>(layers.front().weight.cols()));
    for (const auto& l : layers) sizes.push_back(static_cast<int>(l.weight.rows()));
    return sizes;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

std::vector<double> MlpParams::flat() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias[r]);
    }
    return out;
}

void MlpParams::assign(std::span<const double> values) {
    if (values.size() != parameter_count()) throw ArgumentError("MlpParams::assign: size mismatch");
    std::size_t i = 0;
    for (auto& l : layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = values[i++];
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = values[i++];
    }
}

void MlpParams::set_zero() {
    for (auto& l : layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
}

void MlpParams::validate() const {
    if (layer_sizes() != shape_for(embed_dim)) {
        throw ArgumentError("MLP shape chain does not match [9 + d, 32, 32, 3]");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].bias.size() != layers[l].weight.rows()) {
            throw ArgumentError("MLP bias length does not match its layer");
        }
        if (!layers[l].weight.allFinite() || !layers[l].bias.allFinite()) {
            throw ArgumentError("MLP parameters must be finite");
        }
    }
}

Eigen::VectorXd fusion_input(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c,
                             const Vec3& dir) {
    Eigen::VectorXd x(9 + e_c.d());
    x.segment<3>(0) = l_iso;
    x.segment<3>(3) = l_aniso;
    for (int i = 0; i < e_c.d(); ++i) x[6 + i] = e_c.vec[i];
    x.segment<3>(6 + e_c.d()) = dir;
    return x;
}

Vec3 fuse(const Eigen::VectorXd& input, const MlpParams& params) {
    check_input(input, params);
    Eigen::VectorXd a = input;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Eigen::VectorXd z = params.layers[l].weight * a + params.layers[l].bias;
        if (l + 1 < params.layers.size()) {
            a = z.cwiseMax(0.0);
        } else {
            a = z.unaryExpr([](double v) { return sigmoid(v); });
        }
    }
    if (a.size() != 3) throw ArgumentError("fuse: output layer must have 3 units");
    return a;
}

Vec3 fuse(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c, const Vec3& dir,
          const MlpParams& params) {
    if (e_c.d() != params.embed_dim) throw ArgumentError("fuse: embedding size mismatch");
    return fuse(fusion_input(l_iso, l_aniso, e_c, dir), params);
}

Eigen::VectorXd fuse_backward_accumulate(const Eigen::VectorXd& input, const MlpParams& params,
                                         const Vec3& upstream_grad, MlpParams& accum) {
    check_input(input, params);
    const std::size_t n = params.layers.size();
    if (accum.layers.size() != n) throw ArgumentError("fuse_backward: gradient buffer shape mismatch");

    // Forward, keeping each layer's input and pre-activation.
    std::vector<Eigen::VectorXd> inputs(n);
    std::vector<Eigen::VectorXd> pre(n);
    Eigen::VectorXd a = input;
    for (std::size_t l = 0; l < n; ++l) {
        inputs[l] = a;
        pre[l] = params.layers[l].weight * a + params.layers[l].bias;
        a = l + 1 < n ? Eigen::VectorXd(pre[l].cwiseMax(0.0))
                      : Eigen::VectorXd(pre[l].unaryExpr([](double v) { return sigmoid(v); }));
    }

    Eigen::VectorXd delta(3);
    for (int i = 0; i < 3; ++i) delta[i] = upstream_grad[i] * a[i] * (1.0 - a[i]);
    for (std::size_t l = n; l-- > 0;) {
        accum.layers[l].weight.noalias() += delta * inputs[l].transpose();
        accum.layers[l].bias += delta;
        Eigen::VectorXd back = params.layers[l].weight.transpose() * delta;
        if (l > 0) {
            for (Eigen::Index i = 0; i < back.size(); ++i) {
                if (!(pre[l - 1][i] > 0.0)) back[i] = 0.0;
            }
        }
        delta = std::move(back);
    }
    return delta;
}

FuseGradients fuse_backward(const Vec3& l_iso, const Vec3& l_aniso, const CameraEmbedding& e_c,
                            const Vec3& dir, const MlpParams& params, const Vec3& upstream_grad) {
    if (e_c.d() != params.embed_dim) throw ArgumentError("fuse_backward: embedding size mismatch");
    FuseGradients out{MlpParams::zeros(params.embed_dim), {}};
    out.input_grad =
        fuse_backward_accumulate(fusion_input(l_iso, l_aniso, e_c, dir), params, upstream_grad, out.param_grads);
    return out;
}

} // namespace splat360
