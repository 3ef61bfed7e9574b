#pragma once

// Synthetic image pairs for fitting experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "lutforge/image.hpp"

namespace synthetic {

/// Smooth, textured scene whose left and right halves hold identical content,
/// so any difference between halves after degradation comes from the degradation.
inline lutforge::ImageBuffer scene(int height, int width) {
  lutforge::ImageBuffer img(height, width);
  const int half = std::max(1, width / 2);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const int jj = j % half;
      const double u = half > 1 ? double(jj) / (half - 1) : 0.0;
      const double v = height > 1 ? double(i) / (height - 1) : 0.0;
      // Cheap integer hash for a little deterministic texture.
      std::uint32_t h = std::uint32_t(i) * 73856093u ^ std::uint32_t(jj) * 19349663u;
      h = (h ^ (h >> 13)) * 0x5bd1e995u;
      const double noise = (double(h & 0xFFFFu) / 65535.0 - 0.5) * 0.06;
      const double r = 0.05 + 0.9 * u + noise;
      const double g = 0.05 + 0.9 * v - noise;
      const double b = 0.5 + 0.45 * std::sin(2.0 * std::numbers::pi * (jj + i) / 23.0) + 0.5 * noise;
      img.set_pixel(i, j, {std::clamp(r, 0.0, 1.0), std::clamp(g, 0.0, 1.0), std::clamp(b, 0.0, 1.0)});
    }
  }
  return img;
}

/// Left half darkened by a 2.2 power curve, right half brightened by a gain
/// of 1.8 with clipping at 1.
inline lutforge::ImageBuffer split_degrade(const lutforge::ImageBuffer& clean) {
  lutforge::ImageBuffer out = clean;
  for (int i = 0; i < clean.height(); ++i)
    for (int j = 0; j < clean.width(); ++j)
      for (int c = 0; c < 3; ++c) {
        const double v = clean.at(i, j, c);
        out.at(i, j, c) = j < clean.width() / 2 ? std::pow(v, 2.2) : std::min(1.0, 1.8 * v);
      }
  return out;
}

inline lutforge::ImageBuffer gain(const lutforge::ImageBuffer& img, double factor) {
  lutforge::ImageBuffer out = img;
  for (double& v : out.values()) v = std::clamp(v * factor, 0.0, 1.0);
  return out;
}

}  // namespace synthetic
