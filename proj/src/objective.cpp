#include "lutforge/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "lutforge/error.hpp"
#include "lutforge/metrics.hpp"
#include "lutforge/parallel.hpp"

namespace lutforge {
namespace {

void check_map(const ImageBuffer& y, const UncertaintyMap& s, const char* what) {
  if (y.height() != s.height() || y.width() != s.width()) {
    throw DimensionMismatch(std::string(what) + ": uncertainty map size differs from the image");
  }
}

}  // namespace

UncertaintyMap::UncertaintyMap(int height, int width, double fill, double s_min, double s_max)
    : height_(height), width_(width), s_min_(s_min), s_max_(s_max) {
  if (height < 1 || width < 1) throw InvalidArgument("uncertainty map dimensions must be positive");
  if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
    throw InvalidArgument("uncertainty clamp range must satisfy s_min < s_max");
  }
  s_.assign(std::size_t(height) * std::size_t(width) * 3, std::clamp(fill, s_min, s_max));
}

void UncertaintyMap::clamp() {
  for (double& v : s_) v = std::clamp(v, s_min_, s_max_);
}

ImageBuffer residual(const ImageBuffer& y, const ImageBuffer& y_hat) {
  require_same_shape(y, y_hat, "residual");
  ImageBuffer r(y.height(), y.width(), y.color_space());
  const auto a = y.values();
  const auto b = y_hat.values();
  auto out = r.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return r;
}

double l1_loss(const ImageBuffer& r) {
  const auto v = r.values();
  return tree_sum(0, v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

double l2_loss(const ImageBuffer& r) {
  const auto v = r.values();
  return tree_sum(0, v.size(), [&](std::size_t i) { return v[i] * v[i]; });
}

double homoscedastic_nll(const ImageBuffer& r, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("homoscedastic_nll: scale b must be > 0");
  const auto v = r.values();
  const double log_b = std::log(b);
  return tree_sum(0, v.size(), [&](std::size_t i) { return std::abs(v[i]) / b + log_b; });
}

double unu_loss(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s) {
  require_same_shape(y, y_hat, "unu_loss");
  check_map(y, s, "unu_loss");
  const auto a = y.values();
  const auto b = y_hat.values();
  const auto ls = s.values();
  return tree_sum(0, a.size(), [&](std::size_t i) { return std::exp(-ls[i]) * std::abs(a[i] - b[i]) + ls[i]; });
}

UnuGradients unu_gradients(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s) {
  require_same_shape(y, y_hat, "unu_gradients");
  check_map(y, s, "unu_gradients");
  UnuGradients out{ImageBuffer(y.height(), y.width(), y.color_space()),
                   UncertaintyMap(s.height(), s.width(), 0.0, s.s_min(), s.s_max())};
  const auto a = y.values();
  const auto b = y_hat.values();
  const auto ls = s.values();
  auto gp = out.d_prediction.values();
  auto gs = out.d_log_scale.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - b[i];
    const double inv_scale = std::exp(-ls[i]);
    const double sign = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    gp[i] = -inv_scale * sign;
    gs[i] = 1.0 - inv_scale * std::abs(r);
  }
  return out;
}

void LossWeights::validate() const {
  for (double w : {perceptual, ssim, unu}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("loss weights must be finite and non-negative");
  }
}

LossBreakdown total_loss(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s,
                         const LossWeights& weights) {
  weights.validate();
  require_same_shape(y, y_hat, "total_loss");
  check_map(y, s, "total_loss");
  const double n = double(y.size());
  LossBreakdown out;
  out.l1 = l1_loss(residual(y, y_hat)) / n;
  if (weights.ssim > 0.0) out.ssim = 1.0 - ssim(y, y_hat);
  if (weights.unu > 0.0) out.unu = unu_loss(y, y_hat, s) / n;
  out.total = out.l1 + weights.ssim * out.ssim + weights.unu * out.unu;
  return out;
}

ImageBuffer export_uncertainty(const UncertaintyMap& s) {
  ImageBuffer out(s.height(), s.width(), ColorSpace::Srgb);
  const auto v = s.values();
  std::vector<double> mean(out.pixel_count());
  for (std::size_t p = 0; p < mean.size(); ++p) mean[p] = (v[3 * p] + v[3 * p + 1] + v[3 * p + 2]) / 3.0;
  const auto [lo, hi] = std::minmax_element(mean.begin(), mean.end());
  const double low = *lo;
  const double span = *hi - *lo;
  for (std::size_t p = 0; p < mean.size(); ++p) {
    const double g = span > 0.0 ? (mean[p] - low) / span : 0.5;
    out.set_pixel(p, {g, g, g});
  }
  return out;
}

UncertaintyMap read_uncertainty(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader reader(bytes, "UNCM");
  reader.expect_magic("UNCM");
  const std::uint32_t h = reader.u32("height");
  const std::uint32_t w = reader.u32("width");
  if (h == 0 || w == 0 || h > (1u << 16) || w > (1u << 16)) reader.fail("invalid map header");
  if (std::uint64_t(h) * w * 3 * 4 != bytes.size() - reader.offset()) reader.fail("payload size mismatch");
  UncertaintyMap s{int(h), int(w)};
  for (double& v : s.values()) {
    v = reader.f32("log-scale values");
    if (!std::isfinite(v)) reader.fail("non-finite log-scale value");
  }
  reader.expect_end();
  return s;
}

void write_uncertainty(const UncertaintyMap& s, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("UNCM");
  w.u32(std::uint32_t(s.height()));
  w.u32(std::uint32_t(s.width()));
  for (double v : s.values()) w.f32(float(v));
  detail::write_file_bytes(path, w.bytes());
}

}  // namespace lutforge
