// SPDX-License-Identifier: Apache-2.0

#include "splat360/anchoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "splat360/error.hpp"
#include "splat360/random.hpp"

namespace splat360 {

ImageBuffer depth_gradient(const ImageBuffer& depth) {
    if (depth.channels() != 1) throw ArgumentError("depth_gradient: expected a single-channel image");
    const int w = depth.width();
    const int h = depth.height();
    if (w < 3 || h < 3) throw ArgumentError("depth_gradient: image must be at least 3x3");
    ImageBuffer out(w, h, 1, ImageKind::depth);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double dx, dy;
            if (c == 0) dx = depth.at(r, 1) - depth.at(r, 0);
            else if (c == w - 1) dx = depth.at(r, w - 1) - depth.at(r, w - 2);
            else dx = 0.5 * (depth.at(r, c + 1) - depth.at(r, c - 1));
            if (r == 0) dy = depth.at(1, c) - depth.at(0, c);
            else if (r == h - 1) dy = depth.at(h - 1, c) - depth.at(h - 2, c);
            else dy = 0.5 * (depth.at(r + 1, c) - depth.at(r - 1, c));
            out.at(r, c) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return out;
}

void assign_probabilities(AnchorSet& set) {
    if (set.anchors.empty()) return;
    // Shift by the largest exponent so the softmin never overflows.
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& a : set.anchors) top = std::max(top, -set.beta * a.grad);
    double total = 0.0;
    for (auto& a : set.anchors) {
        a.prob = std::exp(-set.beta * a.grad - top);
        total += a.prob;
    }
    for (auto& a : set.anchors) a.prob /= total;
}

AnchorSet select_anchors(const ImageBuffer& grad, int k, double suppression_radius, double beta) {
    if (k < 1) throw ArgumentError("select_anchors: k must be >= 1");
    if (!(suppression_radius >= 0.0)) throw ArgumentError("select_anchors: radius must be >= 0");
    if (grad.channels() != 1) throw ArgumentError("select_anchors: expected a single-channel image");
    if (!std::isfinite(beta)) throw ArgumentError("select_anchors: beta must be finite");

    struct Candidate {
        double grad;
        int row;
        int col;
    };
    std::vector<Candidate> candidates;
    const int w = grad.width();
    const int h = grad.height();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double v = grad.at(r, c);
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if ((dr || dc) && rr >= 0 && rr < h && cc >= 0 && cc < w && grad.at(rr, cc) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) candidates.push_back({v, r, c});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::make_tuple(-a.grad, a.row, a.col) < std::make_tuple(-b.grad, b.row, b.col);
    });

    AnchorSet set;
    set.beta = beta;
    set.k = k;
    set.suppression_radius = suppression_radius;
    const double r2 = suppression_radius * suppression_radius;
    for (const auto& cand : candidates) {
        if (static_cast<int>(set.anchors.size()) >= k) break;
        const bool clear = std::none_of(set.anchors.begin(), set.anchors.end(), [&](const Anchor& a) {
            const double dr = a.row - cand.row;
            const double dc = a.col - cand.col;
            return dr * dr + dc * dc < r2;
        });
        if (clear) set.anchors.push_back({cand.row, cand.col, cand.grad, 0.0});
    }
    assign_probabilities(set);
    return set;
}

std::vector<std::size_t> sample_anchor_indices(const AnchorSet& anchors, int n, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("sample_anchor_indices: n must be >= 1");
    if (anchors.anchors.empty()) throw ArgumentError("sample_anchor_indices: anchor set is empty");
    std::vector<double> cdf;
    cdf.reserve(anchors.anchors.size());
    double acc = 0.0;
    for (const auto& a : anchors.anchors) cdf.push_back(acc += a.prob);
    Rng rng(seed);
    std::vector<std::size_t> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out.push_back(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
    }
    return out;
}

std::vector<Ray> sample_anchor_rays(const AnchorSet& anchors, const Camera& cam, int n,
                                    std::uint64_t seed) {
    std::vector<Ray> rays;
    rays.reserve(n);
    for (std::size_t j : sample_anchor_indices(anchors, n, seed)) {
        const auto& a = anchors.anchors[j];
        rays.push_back(cam.pixel_ray(a.row, a.col));
    }
    return rays;
}

} // namespace splat360
