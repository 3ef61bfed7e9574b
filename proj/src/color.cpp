#include "lutforge/color.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lutforge/error.hpp"
#include "lutforge/parallel.hpp"

namespace lutforge {
namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

Hsl rgb_to_hsl(const Rgb& rgb) {
  for (double c : rgb) {
    if (!in_unit(c)) throw InvalidArgument("rgb_to_hsl: component outside [0,1]: " + std::to_string(c));
  }
  const double r = rgb[0];
  const double g = rgb[1];
  const double b = rgb[2];
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double chroma = hi - lo;

  Hsl out;
  out.l = 0.5 * (hi + lo);
  if (chroma == 0.0) return out;

  out.s = std::min(1.0, chroma / (1.0 - std::abs(2.0 * out.l - 1.0)));

  double sector;
  if (hi == r) {
    sector = (g - b) / chroma;
  } else if (hi == g) {
    sector = (b - r) / chroma + 2.0;
  } else {
    sector = (r - g) / chroma + 4.0;
  }
  double h = 60.0 * sector;
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

Rgb hsl_to_rgb(const Hsl& hsl) {
  if (!(hsl.h >= 0.0 && hsl.h < 360.0) || !in_unit(hsl.s) || !in_unit(hsl.l)) {
    throw InvalidArgument("hsl_to_rgb: component out of range");
  }
  const double chroma = (1.0 - std::abs(2.0 * hsl.l - 1.0)) * hsl.s;
  const double sector = hsl.h / 60.0;
  const double x = chroma * (1.0 - std::abs(std::fmod(sector, 2.0) - 1.0));
  const double m = hsl.l - 0.5 * chroma;

  Rgb base;
  switch (int(sector)) {
    case 0: base = {chroma, x, 0.0}; break;
    case 1: base = {x, chroma, 0.0}; break;
    case 2: base = {0.0, chroma, x}; break;
    case 3: base = {0.0, x, chroma}; break;
    case 4: base = {x, 0.0, chroma}; break;
    default: base = {chroma, 0.0, x}; break;
  }
  return {std::clamp(base[0] + m, 0.0, 1.0), std::clamp(base[1] + m, 0.0, 1.0),
          std::clamp(base[2] + m, 0.0, 1.0)};
}

PolarizedHsl polarize(const Hsl& hsl) {
  const double angle = std::numbers::pi * hsl.h / 180.0;
  return {std::cos(angle) * hsl.s, std::sin(angle) * hsl.s, hsl.l};
}

ImageBuffer polarize_image(const ImageBuffer& image) {
  require_tag(image, ColorSpace::Srgb, "polarize_image");
  ImageBuffer out(image.height(), image.width(), ColorSpace::PolarizedHsl);
  parallel_for(image.pixel_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const PolarizedHsl z = polarize(rgb_to_hsl(image.pixel(p)));
      out.set_pixel(p, {z.z1, z.z2, z.z3});
    }
  });
  return out;
}

Compensator identity_compensator() {
  return [](const ImageBuffer&, const ImageBuffer& corrected) { return corrected; };
}

Compensator residual_compensator(ImageBuffer residual) {
  return [residual = std::move(residual)](const ImageBuffer&, const ImageBuffer& corrected) {
    require_same_shape(residual, corrected, "residual_compensator");
    ImageBuffer out = corrected;
    auto dst = out.values();
    const auto add = residual.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(dst[i] + add[i], 0.0, 1.0);
    return out;
  };
}

ImageBuffer compensate(const ImageBuffer& z, const ImageBuffer& corrected, const Compensator& fuse) {
  require_tag(z, ColorSpace::PolarizedHsl, "compensate (z)");
  require_tag(corrected, ColorSpace::Srgb, "compensate (corrected)");
  require_same_shape(z, corrected, "compensate");
  ImageBuffer out = fuse(z, corrected);
  require_same_shape(out, corrected, "compensate (fused output)");
  out.set_color_space(ColorSpace::Srgb);
  return out;
}

}  // namespace lutforge
