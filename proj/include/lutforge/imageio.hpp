#pragma once

#include <filesystem>

#include "lutforge/image.hpp"

namespace lutforge {

// 8-bit files load as v / 255 and save as floor(v * 255 + 0.5) after
// clamping to [0, 1]. Bytes are taken as already sRGB-encoded.

/// 8-bit PNG. Gray, gray+alpha, palette and RGBA inputs expand to RGB (alpha
/// dropped); 16-bit files are rejected.
ImageBuffer load_png(const std::filesystem::path& path);
void save_png(const ImageBuffer& image, const std::filesystem::path& path);

/// Writes the channel mean as a single-channel 8-bit PNG.
void save_png_gray(const ImageBuffer& image, const std::filesystem::path& path);

/// Binary PPM (P6) with maxval 255.
ImageBuffer load_ppm(const std::filesystem::path& path);
void save_ppm(const ImageBuffer& image, const std::filesystem::path& path);

/// Color PFM ("PF"), little-endian (scale -1.0), rows stored bottom to top.
ImageBuffer load_pfm(const std::filesystem::path& path);
void save_pfm(const ImageBuffer& image, const std::filesystem::path& path);

/// Dispatch on the file extension (.png, .ppm, .pfm).
ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

}  // namespace lutforge
