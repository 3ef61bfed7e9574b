#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "lutforge/image.hpp"
#include "lutforge/lut3d.hpp"

namespace lutforge {

using LutBank = std::vector<Lut3d>;

/// Per-location blend coefficients for K LUT bases, stored h x w x K
/// (K fastest). A field with `scale` s > 1 is a reduced-resolution map that
/// covers a ceil(H/s) x ceil(W/s) grid and is bilinearly upsampled on use.
class ModulationField {
public:
  ModulationField() = default;
  ModulationField(int height, int width, int bases, int scale = 1, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int bases() const noexcept { return bases_; }
  int scale() const noexcept { return scale_; }
  std::size_t location_count() const noexcept { return std::size_t(height_) * std::size_t(width_); }

  double& at(int row, int col, int k) { return weights_[index(row, col, k)]; }
  double at(int row, int col, int k) const { return weights_[index(row, col, k)]; }

  /// The K coefficients at one location.
  std::span<double> location(std::size_t loc) { return {weights_.data() + loc * bases_, std::size_t(bases_)}; }
  std::span<const double> location(std::size_t loc) const {
    return {weights_.data() + loc * bases_, std::size_t(bases_)};
  }

  std::span<double> values() & noexcept { return weights_; }
  std::span<const double> values() const& noexcept { return weights_; }
  std::span<const double> values() const&& = delete;

  bool same_shape(const ModulationField& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && bases_ == other.bases_ &&
           scale_ == other.scale_;
  }

  /// True when upsampling this field by `scale` yields exactly an H x W map.
  bool covers(int image_height, int image_width) const noexcept;

private:
  std::size_t index(int row, int col, int k) const noexcept {
    return (std::size_t(row) * std::size_t(width_) + std::size_t(col)) * std::size_t(bases_) + std::size_t(k);
  }

  int height_ = 0;
  int width_ = 0;
  int bases_ = 0;
  int scale_ = 1;
  std::vector<double> weights_;
};

/// Bilinear upsampling of each K-slice to a full-resolution (scale 1) field.
/// Sample (a, b) sits at pixel coordinate ((a + 0.5) * scale - 0.5, ...);
/// coordinates beyond the outermost samples clamp to the edge.
ModulationField upsample(const ModulationField& field, int height, int width);

/// Adjoint of `upsample`: folds a full-resolution gradient back onto `shape`.
ModulationField upsample_adjoint(const ModulationField& full_gradient, const ModulationField& shape);

/// Blended correction sum_k m^k * LUT_k(x) without output clamping.
ImageBuffer blend_unclamped(const LutBank& luts, const ModulationField& field, const ImageBuffer& image);

/// `blend_unclamped` followed by a clamp to [0, 1].
ImageBuffer blend(const LutBank& luts, const ModulationField& field, const ImageBuffer& image);

/// Gradient of <upstream, blend_unclamped(...)> with respect to the field's
/// own (possibly reduced-resolution) weights.
ModulationField field_gradients(const LutBank& luts, const ModulationField& field, const ImageBuffer& image,
                                const ImageBuffer& upstream);

/// Gradient of <upstream, blend_unclamped(...)> with respect to every vertex
/// channel of every LUT; entry k is laid out like luts[k].values().
std::vector<std::vector<double>> bank_gradients(const LutBank& luts, const ModulationField& field,
                                                const ImageBuffer& image, const ImageBuffer& upstream);

/// Per-location softmax over the K coefficients.
ModulationField softmax(const ModulationField& logits);

/// Chain rule through `softmax`: given p = softmax(logits) and dL/dp, returns dL/dlogits.
ModulationField softmax_backward(const ModulationField& probabilities, const ModulationField& grad);

/// Non-learned modulation source: softmax over -(lum - a_k)^2 / temperature,
/// where lum is the local mean Rec.709 luma in a (2 * radius + 1)^2 window and
/// the anchors are a_k = (k + 0.5) / K.
ModulationField luminance_router(const ImageBuffer& image, int bases, double temperature, int radius = 2);

/// One K-slice as a grayscale image (value replicated over the three channels).
ImageBuffer field_slice(const ModulationField& field, int k);

/// MODF binary: "MODF", u32 h, w, K, scale, then h * w * K float32 (K fastest).
ModulationField read_field(const std::filesystem::path& path);
void write_field(const ModulationField& field, const std::filesystem::path& path);

}  // namespace lutforge
