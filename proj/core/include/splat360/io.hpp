// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "splat360/anchoring.hpp"
#include "splat360/camera.hpp"
#include "splat360/drr.hpp"
#include "splat360/fitting.hpp"
#include "splat360/fusion.hpp"
#include "splat360/image.hpp"
#include "splat360/metrics.hpp"
#include "splat360/scene.hpp"
#include "splat360/volume.hpp"

namespace splat360 {

namespace fs = std::filesystem;

// Reading helpers throw FormatError with a field path or file position.
std::string read_text(const fs::path& path);
std::vector<std::uint8_t> read_bytes(const fs::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const fs::path& path, const std::string& bytes);

// Scene JSON: {"background": [3], "gaussians": [{"mu", "cov" (xx,xy,xz,yy,yz,zz),
// "alpha", "l_iso", "l_aniso", "normal", "g"}]}. Unknown keys are rejected.
Scene parse_scene_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
Scene load_scene(const fs::path& path);
void save_scene(const fs::path& path, const Scene& scene);

// Camera JSON: {"position", "forward", "up", "fov_y", "width", "height", "near"}.
// right is derived as forward x up.
Camera parse_camera_json(const std::string& text);
std::string camera_to_json(const Camera& cam);

/// 8-bit binary PPM (P6). Values are clamped to [0, 1] and gamma encoded
/// with exponent 1/2.2; single-channel images are replicated to gray.
std::string encode_ppm(const ImageBuffer& img);
/// Decodes P6 back to linear radiance (inverse gamma 2.2).
ImageBuffer decode_ppm(const std::string& bytes);
std::uint8_t gamma_encode(double linear);
double gamma_decode(std::uint8_t value);

/// Little-endian PFM (scale -1.0), rows stored bottom to top, 32-bit floats.
std::string encode_pfm(const ImageBuffer& img);
ImageBuffer decode_pfm(const std::string& bytes, ImageKind kind = ImageKind::radiance);

void write_ppm(const fs::path& path, const ImageBuffer& img);
void write_pfm(const fs::path& path, const ImageBuffer& img);
/// Reads a PPM or PFM file depending on its magic number.
ImageBuffer read_image(const fs::path& path);

// Volume header: key=value lines with dims, spacing, origin, data (path relative
// to the header), dtype=int16le.
VoxelVolume load_volume(const fs::path& header_path);
void save_volume(const fs::path& header_path, const VoxelVolume& vol);

// MLP file: text header (magic, layers=..., d=..., seed=..., count=..., data)
// followed by count little-endian doubles.
std::string encode_mlp(const MlpParams& mlp);
MlpParams decode_mlp(const std::string& bytes);
void save_mlp(const fs::path& path, const MlpParams& mlp);
MlpParams load_mlp(const fs::path& path);

std::string anchors_to_json(const AnchorSet& set, std::uint64_t seed,
                            const std::vector<std::size_t>& samples = {});
std::string fit_report_to_json(const FitReport& report);
std::string runtime_report_to_json(const RuntimeReport& report);

} // namespace splat360
