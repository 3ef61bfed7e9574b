#include "lutforge/lut3d.hpp"

#include <algorithm>
#include <cmath>

#include "lutforge/error.hpp"
#include "lutforge/parallel.hpp"

namespace lutforge {
namespace {

void check_size(int size) {
  if (size < kMinLutSize || size > kMaxLutSize) {
    throw InvalidArgument("LUT size must be in [" + std::to_string(kMinLutSize) + ", " +
                          std::to_string(kMaxLutSize) + "], got " + std::to_string(size));
  }
}

bool finite3(const Rgb& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

Lut3d::Lut3d(int size, const Rgb& fill) : size_(size) {
  check_size(size);
  if (!finite3(fill)) throw InvalidArgument("LUT vertices must be finite");
  values_.resize(vertex_count() * 3);
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    values_[3 * v] = fill[0];
    values_[3 * v + 1] = fill[1];
    values_[3 * v + 2] = fill[2];
  }
}

void Lut3d::set_vertex(std::size_t index, const Rgb& v) {
  if (!finite3(v)) throw InvalidArgument("LUT vertices must be finite");
  values_[3 * index] = v[0];
  values_[3 * index + 1] = v[1];
  values_[3 * index + 2] = v[2];
}

bool Lut3d::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Lut3d make_identity(int size) {
  Lut3d lut(size);
  const double denom = double(size - 1);
  for (int b = 0; b < size; ++b)
    for (int g = 0; g < size; ++g)
      for (int r = 0; r < size; ++r) lut.set_vertex(r, g, b, {r / denom, g / denom, b / denom});
  return lut;
}

TrilinearCell locate(const Lut3d& lut, const Rgb& rgb) {
  const int n = lut.size();
  const double scale = double(n - 1);
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int c = 0; c < 3; ++c) {
    const double t = std::clamp(rgb[c], 0.0, 1.0) * scale;
    const int i = std::min(int(std::floor(t)), n - 2);
    base[c] = i;
    frac[c] = t - double(i);
  }

  TrilinearCell cell;
  for (int corner = 0; corner < 8; ++corner) {
    const int dr = corner & 1;
    const int dg = (corner >> 1) & 1;
    const int db = (corner >> 2) & 1;
    cell.vertex[corner] = lut.linear_index(base[0] + dr, base[1] + dg, base[2] + db);
    cell.weight[corner] = (dr ? frac[0] : 1.0 - frac[0]) * (dg ? frac[1] : 1.0 - frac[1]) *
                          (db ? frac[2] : 1.0 - frac[2]);
  }
  return cell;
}

Rgb apply(const Lut3d& lut, const Rgb& rgb) {
  if (!finite3(rgb)) throw InvalidArgument("apply: input color is not finite");
  const TrilinearCell cell = locate(lut, rgb);
  const auto values = lut.values();
  Rgb out{0.0, 0.0, 0.0};
  for (int corner = 0; corner < 8; ++corner) {
    const double w = cell.weight[corner];
    const std::size_t v = 3 * cell.vertex[corner];
    out[0] += w * values[v];
    out[1] += w * values[v + 1];
    out[2] += w * values[v + 2];
  }
  return out;
}

ImageBuffer apply_image(const Lut3d& lut, const ImageBuffer& image) {
  require_tag(image, ColorSpace::Srgb, "apply_image");
  ImageBuffer out(image.height(), image.width(), ColorSpace::Srgb);
  parallel_for(image.pixel_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      Rgb v = lutforge::apply(lut, image.pixel(p));
      for (double& c : v) c = std::clamp(c, 0.0, 1.0);
      out.set_pixel(p, v);
    }
  });
  return out;
}

double lipschitz_bound(const Lut3d& lut) {
  const int n = lut.size();
  double max_step = 0.0;
  auto consider = [&](std::size_t a, std::size_t b) {
    const Rgb va = lut.vertex(a);
    const Rgb vb = lut.vertex(b);
    const double d0 = va[0] - vb[0];
    const double d1 = va[1] - vb[1];
    const double d2 = va[2] - vb[2];
    max_step = std::max(max_step, std::sqrt(d0 * d0 + d1 * d1 + d2 * d2));
  };
  for (int b = 0; b < n; ++b)
    for (int g = 0; g < n; ++g)
      for (int r = 0; r < n; ++r) {
        const std::size_t here = lut.linear_index(r, g, b);
        if (r + 1 < n) consider(here, lut.linear_index(r + 1, g, b));
        if (g + 1 < n) consider(here, lut.linear_index(r, g + 1, b));
        if (b + 1 < n) consider(here, lut.linear_index(r, g, b + 1));
      }
  return max_step / lut.delta();
}

std::array<VertexGradient, 8> vertex_gradients(const Lut3d& lut, const Rgb& rgb, const Rgb& upstream) {
  const TrilinearCell cell = locate(lut, rgb);
  std::array<VertexGradient, 8> grads;
  for (int corner = 0; corner < 8; ++corner) {
    const double w = cell.weight[corner];
    grads[corner] = {cell.vertex[corner], {w * upstream[0], w * upstream[1], w * upstream[2]}};
  }
  return grads;
}

}  // namespace lutforge
