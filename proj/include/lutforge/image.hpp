#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lutforge {

/// An RGB triple. A distinct type (rather than std::array) so that calls like
/// apply(lut, rgb) never pick up std::apply through argument-dependent lookup.
struct Rgb {
  std::array<double, 3> c{};

  constexpr double& operator[](std::size_t i) noexcept { return c[i]; }
  constexpr double operator[](std::size_t i) const noexcept { return c[i]; }
  constexpr double* begin() noexcept { return c.data(); }
  constexpr double* end() noexcept { return c.data() + 3; }
  constexpr const double* begin() const noexcept { return c.data(); }
  constexpr const double* end() const noexcept { return c.data() + 3; }
  friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

enum class ColorSpace { Srgb, PolarizedHsl };

std::string_view to_string(ColorSpace space);

/// Interleaved H x W x 3 image, row-major. Values are nominally in [0, 1]
/// for sRGB content; polarized-HSL images carry signed hue channels.
class ImageBuffer {
public:
  ImageBuffer() = default;
  ImageBuffer(int height, int width, ColorSpace space = ColorSpace::Srgb, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return std::size_t(height_) * std::size_t(width_); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  ColorSpace color_space() const noexcept { return space_; }
  void set_color_space(ColorSpace space) noexcept { space_ = space; }

  double& at(int row, int col, int channel) { return data_[index(row, col, channel)]; }
  double at(int row, int col, int channel) const { return data_[index(row, col, channel)]; }

  Rgb pixel(std::size_t p) const { return {data_[3 * p], data_[3 * p + 1], data_[3 * p + 2]}; }
  Rgb pixel(int row, int col) const { return pixel(std::size_t(row) * width_ + col); }
  void set_pixel(std::size_t p, const Rgb& v) {
    data_[3 * p] = v[0];
    data_[3 * p + 1] = v[1];
    data_[3 * p + 2] = v[2];
  }
  void set_pixel(int row, int col, const Rgb& v) { set_pixel(std::size_t(row) * width_ + col, v); }

  std::span<double> values() & noexcept { return data_; }
  std::span<const double> values() const& noexcept { return data_; }
  std::span<const double> values() const&& = delete;

  bool same_shape(const ImageBuffer& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

private:
  std::size_t index(int row, int col, int channel) const noexcept {
    return (std::size_t(row) * std::size_t(width_) + std::size_t(col)) * 3 + std::size_t(channel);
  }

  int height_ = 0;
  int width_ = 0;
  ColorSpace space_ = ColorSpace::Srgb;
  std::vector<double> data_;
};

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, std::string_view what);
void require_tag(const ImageBuffer& image, ColorSpace expected, std::string_view what);

/// Clamp every value to [0, 1] in place.
void clamp_unit(ImageBuffer& image);

}  // namespace lutforge
