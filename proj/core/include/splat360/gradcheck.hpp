// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace splat360 {

struct GradCheckResult {
    std::string name;
    std::size_t compared = 0;
    double max_error = 0.0; // relative, or absolute for near-zero components
    double tolerance = 0.0;
    bool passed = true;
};

/// Analytic vs finite-difference comparison. Components whose analytic value
/// is below 1e-8 in magnitude are compared absolutely against that floor.
double gradient_error(double analytic, double numeric);

/// Fusion MLP parameter and input gradients against central differences
/// (h = 1e-5) over the given number of random draws.
GradCheckResult check_fusion_gradients(std::uint64_t seed, int draws, double tolerance);

/// Composite loss pixel gradient against central differences on random image pairs.
GradCheckResult check_loss_gradients(std::uint64_t seed, int draws, int size, double lambda_mse,
                                     double lambda_ssim, double tolerance);

/// Appearance gradient through the full render of a 3-primitive scene at size x size.
GradCheckResult check_render_gradients(std::uint64_t seed, int size, double tolerance);

} // namespace splat360
