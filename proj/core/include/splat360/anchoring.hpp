// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "splat360/camera.hpp"
#include "splat360/image.hpp"

namespace splat360 {

struct Anchor {
    int row = 0;
    int col = 0;
    double grad = 0.0; // |grad D| at the pixel
    double prob = 0.0;
};

/// Anchor pivots sorted by descending gradient magnitude, with sampling
/// probabilities proportional to exp(-beta * grad).
struct AnchorSet {
    std::vector<Anchor> anchors;
    double beta = 1.0;
    int k = 64;
    double suppression_radius = 5.0;
};

/// |grad D| with central differences inside and one-sided differences at the border.
ImageBuffer depth_gradient(const ImageBuffer& depth);

/// Greedy non-maximum-suppressed selection of up to k local maxima.
AnchorSet select_anchors(const ImageBuffer& grad, int k, double suppression_radius, double beta);

/// Recomputes probabilities in place as the softmin of the stored gradients.
void assign_probabilities(AnchorSet& set);

/// Draws n anchor indices i.i.d. by inverse CDF over the stored order.
std::vector<std::size_t> sample_anchor_indices(const AnchorSet& anchors, int n, std::uint64_t seed);

/// Camera rays through the pixel centers of n sampled anchors.
std::vector<Ray> sample_anchor_rays(const AnchorSet& anchors, const Camera& cam, int n,
                                    std::uint64_t seed);

} // namespace splat360
