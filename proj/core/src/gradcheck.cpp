// SPDX-License-Identifier: Apache-2.0

#include "splat360/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "render_kernels.hpp"
#include "splat360/fitting.hpp"
#include "splat360/fusion.hpp"
#include "splat360/random.hpp"
#include "splat360/synthetic.hpp"

namespace splat360 {
namespace {

constexpr double kTinyAnalytic = 1e-8;

void record(GradCheckResult& r, double analytic, double numeric) {
    const double e = gradient_error(analytic, numeric);
    r.max_error = std::max(r.max_error, e);
    ++r.compared;
}

// Keeps hidden pre-activations away from the ReLU kink so central differences are valid.
bool clear_of_kinks(const Eigen::VectorXd& input, const MlpParams& p, double margin) {
    Eigen::VectorXd a = input;
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
        const Eigen::VectorXd z = p.layers[l].weight * a + p.layers[l].bias;
        if ((z.cwiseAbs().array() < margin).any()) return false;
        a = z.cwiseMax(0.0);
    }
    return true;
}

} // namespace

double gradient_error(double analytic, double numeric) {
    const double diff = std::abs(analytic - numeric);
    if (std::abs(analytic) < kTinyAnalytic) return diff <= kTinyAnalytic ? 0.0 : diff;
    return diff / std::max(std::abs(analytic), std::abs(numeric));
}

GradCheckResult check_fusion_gradients(std::uint64_t seed, int draws, double tolerance) {
    GradCheckResult r{"fusion_mlp", 0, 0.0, tolerance, true};
    Rng rng(seed);
    constexpr double h = 1e-5;
    for (int draw = 0; draw < draws; ++draw) {
        MlpParams params = MlpParams::init(kDefaultEmbeddingDim, rng.next());
        for (auto& l : params.layers) {
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = rng.uniform(-0.5, 0.5);
        }
        Eigen::VectorXd input(params.input_size());
        do {
            for (Eigen::Index i = 0; i < input.size(); ++i) input[i] = rng.uniform(-1.0, 1.0);
        } while (!clear_of_kinks(input, params, 1e-3));
        const Vec3 upstream(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));

        MlpParams grads = MlpParams::zeros(params.embed_dim);
        const Eigen::VectorXd input_grad = fuse_backward_accumulate(input, params, upstream, grads);
        auto objective = [&](const Eigen::VectorXd& x, const MlpParams& p) { return upstream.dot(fuse(x, p)); };

        auto flat = params.flat();
        const auto flat_grad = grads.flat();
        MlpParams probe = params;
        for (std::size_t j = 0; j < flat.size(); ++j) {
            const double saved = flat[j];
            flat[j] = saved + h;
            probe.assign(flat);
            const double up = objective(input, probe);
            flat[j] = saved - h;
            probe.assign(flat);
            const double down = objective(input, probe);
            flat[j] = saved;
            record(r, flat_grad[j], (up - down) / (2.0 * h));
        }
        for (Eigen::Index j = 0; j < input.size(); ++j) {
            Eigen::VectorXd x = input;
            x[j] += h;
            const double up = objective(x, params);
            x[j] = input[j] - h;
            const double down = objective(x, params);
            record(r, input_grad[j], (up - down) / (2.0 * h));
        }
    }
    r.passed = r.max_error < tolerance;
    return r;
}

GradCheckResult check_loss_gradients(std::uint64_t seed, int draws, int size, double lambda_mse,
                                     double lambda_ssim, double tolerance) {
    GradCheckResult r{"composite_loss_" + std::to_string(size) + "x" + std::to_string(size), 0, 0.0,
                      tolerance, true};
    Rng rng(seed);
    constexpr double h = 1e-5;
    for (int draw = 0; draw < draws; ++draw) {
        ImageBuffer pred(size, size, 3, ImageKind::radiance);
        ImageBuffer target(size, size, 3, ImageKind::radiance);
        for (double& v : pred.data()) v = rng.uniform(0.1, 0.9);
        for (double& v : target.data()) v = rng.uniform(0.1, 0.9);
        const auto analytic = composite_loss(pred, target, lambda_mse, lambda_ssim);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double saved = pred.data()[i];
            pred.data()[i] = saved + h;
            const double up = composite_loss(pred, target, lambda_mse, lambda_ssim).loss;
            pred.data()[i] = saved - h;
            const double down = composite_loss(pred, target, lambda_mse, lambda_ssim).loss;
            pred.data()[i] = saved;
            record(r, analytic.grad.data()[i], (up - down) / (2.0 * h));
        }
    }
    r.passed = r.max_error < tolerance;
    return r;
}

GradCheckResult check_render_gradients(std::uint64_t seed, int size, double tolerance) {
    GradCheckResult r{"render_appearance", 0, 0.0, tolerance, true};
    Rng rng(seed);
    PrimitiveRanges ranges;
    ranges.position_radius = 0.4;
    ranges.scale_min = 0.2;
    ranges.scale_max = 0.4;
    ranges.alpha_min = 0.3;
    ranges.alpha_max = 0.8; // keeps transmittance above the termination threshold
    std::vector<GaussianPrimitive> gs;
    for (int i = 0; i < 3; ++i) gs.push_back(random_primitive(rng, ranges));
    Scene scene(gs, Vec3(0.1, 0.2, 0.3));

    const auto cams = make_orbit_cameras(Vec3::Zero(), 2.5, 2, 0.3, OrbitMode::ring, size, size, 0.9);
    std::vector<FitTarget> targets;
    const Scene reference = random_scene(3, rng.next(), ranges);
    for (const auto& cam : cams) targets.push_back({cam, render(reference, cam, RenderConfig{}).color});

    FitConfig cfg;
    const RenderConfig rcfg;
    const auto analytic = appearance_gradient(scene, targets, cfg, rcfg, nullptr);

    constexpr double h = 1e-6;
    auto field = [](GaussianPrimitive& p, int k) -> double& {
        if (k == detail::kGradAlpha) return p.alpha;
        if (k < detail::kGradAniso) return p.l_iso[k - detail::kGradIso];
        if (k < detail::kGradG) return p.l_aniso[k - detail::kGradAniso];
        return p.g;
    };
    for (std::size_t i = 0; i < gs.size(); ++i) {
        for (int k = 0; k < detail::kGradStride; ++k) {
            auto plus = gs;
            auto minus = gs;
            field(plus[i], k) += h;
            field(minus[i], k) -= h;
            const double up = total_loss(Scene(plus, scene.background()), targets, cfg, rcfg, nullptr);
            const double down = total_loss(Scene(minus, scene.background()), targets, cfg, rcfg, nullptr);
            record(r, analytic[i * detail::kGradStride + k], (up - down) / (2.0 * h));
        }
    }
    r.passed = r.max_error < tolerance;
    return r;
}

} // namespace splat360
