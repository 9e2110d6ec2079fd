// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace splat360 {

enum class ImageKind { radiance, depth, line_integral, transmittance };

const char* to_string(ImageKind kind);

/// Row-major H x W x C image of doubles. Row 0 is the top of the image.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, ImageKind kind, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    ImageKind kind() const { return kind_; }
    void set_kind(ImageKind kind) { kind_ = kind; }
    std::size_t size() const { return data_.size(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double& at(int row, int col, int c = 0) { return data_[index(row, col, c)]; }
    double at(int row, int col, int c = 0) const { return data_[index(row, col, c)]; }
    std::size_t index(int row, int col, int c = 0) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + c;
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool same_shape(const ImageBuffer& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }
    bool all_finite() const;

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    ImageKind kind_ = ImageKind::radiance;
    std::vector<double> data_;
};

} // namespace splat360
