// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splat360/camera.hpp"
#include "splat360/error.hpp"
#include "splat360/fusion.hpp"
#include "splat360/image.hpp"
#include "splat360/metrics.hpp"
#include "splat360/renderer.hpp"
#include "splat360/scene.hpp"

namespace splat360 {

struct Ablation {
    bool no_anchoring = false;   // uniform ray subsets instead of anchor-weighted ones
    bool no_disentangle = false; // f = 1
    bool no_dual_branch = false; // ignore the fusion MLP
    bool no_anisotropy = false;  // f = 0

    /// Parses a comma-separated list such as "no_anisotropy,no_anchoring".
    static Ablation parse(const std::string& list);
    std::string to_string() const;
};

struct FitConfig {
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_adam = 1e-8;
    long lr_halve_every = 50000;
    int iters = 1000;
    double lambda_mse = 1.0;
    double lambda_ssim = 0.2;
    double lambda_lpips = 0.0; // not supported; any positive value is rejected
    bool optimize_geometry = false;
    Ablation ablation;
    std::uint64_t seed = 0;

    int rays_per_step = 4096;     // <= 0 or >= total pixels: full-batch gradients
    int anchor_k = 64;
    double anchor_beta = 1.0;
    double anchor_radius = 5.0;
    double anchor_mix = 0.5;      // share of rays drawn from anchors
    double geometry_fd_step = 1e-4;
    int workers = 1;

    void validate() const;
};

/// Applies the ablation toggles that live in the renderer.
RenderConfig ablated(const RenderConfig& base, const Ablation& ablation);

struct LossResult {
    double loss = 0.0;
    ImageBuffer grad; // d loss / d pred
};

/// lambda_mse * MSE + lambda_ssim * (1 - SSIM) and its exact gradient.
LossResult composite_loss(const ImageBuffer& pred, const ImageBuffer& target, double lambda_mse,
                          double lambda_ssim);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;
};

/// Learning rate for the step taken when state.t == completed_steps.
double scheduled_lr(const FitConfig& cfg, long completed_steps);

/// One bias-corrected Adam update; t increments by one.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const FitConfig& cfg);

struct FitTarget {
    Camera camera;
    ImageBuffer image;
};

struct ViewMetrics {
    double psnr = 0.0;
    double ssim = 0.0;
};

struct FitReport {
    std::vector<double> loss_trace; // full loss before each step
    std::vector<ViewMetrics> views; // after the final step
    double final_loss = 0.0;
    double seconds = 0.0;
    int iterations = 0;

    double mean_psnr() const;
    double mean_ssim() const;
};

struct FitResult {
    Scene scene;
    std::optional<MlpParams> mlp;
    FitReport report;
};

/// Thrown when the loss becomes non-finite; carries the report up to the failure.
class FitAborted : public NumericError {
public:
    FitAborted(const std::string& what, FitReport report)
        : NumericError(what), report_(std::move(report)) {}
    const FitReport& report() const { return report_; }

private:
    FitReport report_;
};

/// Mean composite loss over the targets for a fixed scene (and MLP when fused).
double total_loss(const Scene& scene, const std::vector<FitTarget>& targets, const FitConfig& cfg,
                  const RenderConfig& render_cfg, const MlpParams* mlp);

/// Full-batch analytic gradient of total_loss with respect to each primitive's
/// raw appearance (alpha, l_iso[3], l_aniso[3], g), 8 values per primitive.
/// When mlp is given and mlp_grad is non-null, MLP gradients are returned too.
std::vector<double> appearance_gradient(const Scene& scene, const std::vector<FitTarget>& targets,
                                        const FitConfig& cfg, const RenderConfig& render_cfg,
                                        const MlpParams* mlp, MlpParams* mlp_grad = nullptr);

FitResult fit_scene(const Scene& scene, const std::vector<FitTarget>& targets, const FitConfig& cfg,
                    const RenderConfig& render_cfg, std::optional<MlpParams> mlp = std::nullopt);

} // namespace splat360
