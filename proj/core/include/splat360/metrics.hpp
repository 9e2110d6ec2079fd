// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "splat360/camera.hpp"
#include "splat360/image.hpp"
#include "splat360/renderer.hpp"
#include "splat360/scene.hpp"

namespace splat360 {

/// Reported PSNR for identical images.
inline constexpr double kPsnrCap = 99.0;

struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    /// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
    std::vector<double> taps() const;
    void validate() const;
};

double mse(const ImageBuffer& a, const ImageBuffer& b);

/// 10 log10(1 / MSE), capped at kPsnrCap.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean local SSIM over valid window positions, averaged over channels.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimConfig& cfg = {});

/// SSIM of pred against target; when grad is non-empty it receives
/// d SSIM / d pred (same layout as pred.data()).
double ssim_with_gradient(const ImageBuffer& pred, const ImageBuffer& target, const SsimConfig& cfg,
                          std::span<double> grad);

struct RuntimeReport {
    int width = 0;
    int height = 0;
    int frames = 0;
    double total_seconds = 0.0;
    double fps = 0.0;
    double ms_per_frame = 0.0;
    int workers = 1;
    unsigned hardware_threads = 0;
    std::string cpu;
};

/// Renders every camera once after an untimed warm-up frame.
RuntimeReport measure_runtime(const Scene& scene, const std::vector<Camera>& cams,
                              const RenderConfig& cfg, int workers);

/// CPU model string from the host, or "unknown".
std::string host_cpu_name();

} // namespace splat360
