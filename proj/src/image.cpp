#include "lutforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lutforge/error.hpp"

namespace lutforge {

std::string_view to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::Srgb:
      return "sRGB";
    case ColorSpace::PolarizedHsl:
      return "polarized-HSL";
  }
  return "unknown";
}

ImageBuffer::ImageBuffer(int height, int width, ColorSpace space, double fill)
    : height_(height), width_(width), space_(space) {
  if (height < 1 || width < 1) {
    throw InvalidArgument("image dimensions must be at least 1x1, got " + std::to_string(height) +
                          "x" + std::to_string(width));
  }
  data_.assign(std::size_t(height) * std::size_t(width) * 3, fill);
}

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(what) + ": image sizes differ (" +
                            std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                            std::to_string(b.height()) + "x" + std::to_string(b.width()) + ")");
  }
}

void require_tag(const ImageBuffer& image, ColorSpace expected, std::string_view what) {
  if (image.color_space() != expected) {
    throw TagMismatch(std::string(what) + ": expected " + std::string(to_string(expected)) +
                      " image, got " + std::string(to_string(image.color_space())));
  }
}

void clamp_unit(ImageBuffer& image) {
  for (double& v : image.values()) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace lutforge
