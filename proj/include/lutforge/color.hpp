#pragma once

#include <functional>

#include "lutforge/image.hpp"

namespace lutforge {

/// Cylindrical HSL with lightness (max + min) / 2. Hue in degrees, [0, 360).
/// Achromatic colors carry the canonical hue 0.
struct Hsl {
  double h = 0.0;
  double s = 0.0;
  double l = 0.0;
};

/// Hue mapped onto the unit circle and scaled by saturation:
/// z = (cos(H) * S, sin(H) * S, L). Continuous across the 0/360 hue seam.
struct PolarizedHsl {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
};

/// Both directions require components in [0, 1] (hue in [0, 360)) and throw
/// InvalidArgument otherwise.
Hsl rgb_to_hsl(const Rgb& rgb);
Rgb hsl_to_rgb(const Hsl& hsl);

PolarizedHsl polarize(const Hsl& hsl);

/// Per-pixel rgb_to_hsl + polarize. Output is tagged ColorSpace::PolarizedHsl.
ImageBuffer polarize_image(const ImageBuffer& image);

/// Fusion of the polarized representation with a LUT-corrected image into
/// the refined output. The learned compensation network is not part of this
/// library; callers plug their own rule in here.
using Compensator = std::function<ImageBuffer(const ImageBuffer& z, const ImageBuffer& corrected)>;

/// Returns the corrected image unchanged.
Compensator identity_compensator();

/// Adds a fixed residual image to the corrected result and clamps to [0, 1].
Compensator residual_compensator(ImageBuffer residual);

/// Validates tags and shapes, then runs `fuse`.
ImageBuffer compensate(const ImageBuffer& z, const ImageBuffer& corrected, const Compensator& fuse);

}  // namespace lutforge
