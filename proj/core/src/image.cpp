// SPDX-License-Identifier: Apache-2.0

#include "splat360/image.hpp"

#include <algorithm>
#include <cmath>

#include "splat360/error.hpp"

namespace splat360 {

const char* to_string(ImageKind kind) {
    switch (kind) {
    case ImageKind::radiance: return "radiance";
    case ImageKind::depth: return "depth";
    case ImageKind::line_integral: return "line_integral";
    case ImageKind::transmittance: return "transmittance";
    }
    return "unknown";
}

ImageBuffer::ImageBuffer(int width, int height, int channels, ImageKind kind, double fill)
    : width_(width), height_(height), channels_(channels), kind_(kind) {
    if (width < 1 || height < 1) throw ArgumentError("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw ArgumentError("image must have 1 or 3 channels");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

bool ImageBuffer::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

} // namespace splat360
