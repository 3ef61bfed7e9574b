#include "lutforge/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "lutforge/error.hpp"
#include "lutforge/parallel.hpp"

namespace lutforge {
namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

struct Tap {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
};

// 1-D bilinear taps from `out_len` full-resolution samples onto `in_len` coarse ones.
std::vector<Tap> make_taps(int out_len, int in_len, int scale) {
  std::vector<Tap> taps(static_cast<std::size_t>(out_len));
  for (int i = 0; i < out_len; ++i) {
    const double pos = std::clamp((i + 0.5) / scale - 0.5, 0.0, double(in_len - 1));
    Tap t;
    t.lo = int(std::floor(pos));
    t.hi = std::min(t.lo + 1, in_len - 1);
    t.frac = pos - t.lo;
    taps[std::size_t(i)] = t;
  }
  return taps;
}

void check_bank(const LutBank& luts, const ModulationField& field, const ImageBuffer& image, const char* what) {
  require_tag(image, ColorSpace::Srgb, what);
  if (luts.size() != std::size_t(field.bases())) {
    throw DimensionMismatch(std::string(what) + ": field has K=" + std::to_string(field.bases()) + " but " +
                            std::to_string(luts.size()) + " LUTs were supplied");
  }
  if (!field.covers(image.height(), image.width())) {
    throw DimensionMismatch(std::string(what) + ": field " + std::to_string(field.height()) + "x" +
                            std::to_string(field.width()) + " at scale " + std::to_string(field.scale()) +
                            " does not cover a " + std::to_string(image.height()) + "x" +
                            std::to_string(image.width()) + " image");
  }
}

ModulationField full_resolution(const ModulationField& field, const ImageBuffer& image) {
  if (field.scale() == 1) return field;
  return upsample(field, image.height(), image.width());
}

}  // namespace

ModulationField::ModulationField(int height, int width, int bases, int scale, double fill)
    : height_(height), width_(width), bases_(bases), scale_(scale) {
  if (height < 1 || width < 1) throw InvalidArgument("modulation field dimensions must be positive");
  if (bases < 1) throw InvalidArgument("modulation field needs K >= 1");
  if (scale < 1) throw InvalidArgument("modulation field scale must be >= 1");
  weights_.assign(location_count() * std::size_t(bases), fill);
}

bool ModulationField::covers(int image_height, int image_width) const noexcept {
  return height_ == ceil_div(image_height, scale_) && width_ == ceil_div(image_width, scale_);
}

ModulationField upsample(const ModulationField& field, int height, int width) {
  if (!field.covers(height, width)) {
    throw DimensionMismatch("upsample: field " + std::to_string(field.height()) + "x" +
                            std::to_string(field.width()) + " at scale " + std::to_string(field.scale()) +
                            " is inconsistent with " + std::to_string(height) + "x" + std::to_string(width));
  }
  const int k_count = field.bases();
  ModulationField out(height, width, k_count, 1);
  if (field.scale() == 1) {
    std::copy(field.values().begin(), field.values().end(), out.values().begin());
    return out;
  }
  const auto rows = make_taps(height, field.height(), field.scale());
  const auto cols = make_taps(width, field.width(), field.scale());
  parallel_for(std::size_t(height), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Tap& ty = rows[i];
      for (int j = 0; j < width; ++j) {
        const Tap& tx = cols[std::size_t(j)];
        for (int k = 0; k < k_count; ++k) {
          const double top = (1.0 - tx.frac) * field.at(ty.lo, tx.lo, k) + tx.frac * field.at(ty.lo, tx.hi, k);
          const double bottom = (1.0 - tx.frac) * field.at(ty.hi, tx.lo, k) + tx.frac * field.at(ty.hi, tx.hi, k);
          out.at(int(i), j, k) = (1.0 - ty.frac) * top + ty.frac * bottom;
        }
      }
    }
  });
  return out;
}

ModulationField upsample_adjoint(const ModulationField& full_gradient, const ModulationField& shape) {
  const int height = full_gradient.height();
  const int width = full_gradient.width();
  if (full_gradient.scale() != 1 || full_gradient.bases() != shape.bases() || !shape.covers(height, width)) {
    throw DimensionMismatch("upsample_adjoint: gradient does not match the field shape");
  }
  ModulationField out(shape.height(), shape.width(), shape.bases(), shape.scale());
  if (shape.scale() == 1) {
    std::copy(full_gradient.values().begin(), full_gradient.values().end(), out.values().begin());
    return out;
  }
  const auto rows = make_taps(height, shape.height(), shape.scale());
  const auto cols = make_taps(width, shape.width(), shape.scale());
  const int k_count = shape.bases();
  // Parallel over K: each slice accumulates in a fixed pixel order.
  parallel_for(std::size_t(k_count), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t kk = kb; kk < ke; ++kk) {
      const int k = int(kk);
      for (int i = 0; i < height; ++i) {
        const Tap& ty = rows[std::size_t(i)];
        for (int j = 0; j < width; ++j) {
          const Tap& tx = cols[std::size_t(j)];
          const double g = full_gradient.at(i, j, k);
          out.at(ty.lo, tx.lo, k) += (1.0 - ty.frac) * (1.0 - tx.frac) * g;
          out.at(ty.lo, tx.hi, k) += (1.0 - ty.frac) * tx.frac * g;
          out.at(ty.hi, tx.lo, k) += ty.frac * (1.0 - tx.frac) * g;
          out.at(ty.hi, tx.hi, k) += ty.frac * tx.frac * g;
        }
      }
    }
  });
  return out;
}

ImageBuffer blend_unclamped(const LutBank& luts, const ModulationField& field, const ImageBuffer& image) {
  check_bank(luts, field, image, "blend");
  const ModulationField full = full_resolution(field, image);
  ImageBuffer out(image.height(), image.width(), ColorSpace::Srgb);
  parallel_for(image.pixel_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Rgb x = image.pixel(p);
      const auto m = full.location(p);
      Rgb acc{0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < luts.size(); ++k) {
        const Rgb o = lutforge::apply(luts[k], x);
        acc[0] += m[k] * o[0];
        acc[1] += m[k] * o[1];
        acc[2] += m[k] * o[2];
      }
      out.set_pixel(p, acc);
    }
  });
  return out;
}

ImageBuffer blend(const LutBank& luts, const ModulationField& field, const ImageBuffer& image) {
  ImageBuffer out = blend_unclamped(luts, field, image);
  clamp_unit(out);
  return out;
}

ModulationField field_gradients(const LutBank& luts, const ModulationField& field, const ImageBuffer& image,
                                const ImageBuffer& upstream) {
  check_bank(luts, field, image, "field_gradients");
  require_same_shape(image, upstream, "field_gradients");
  ModulationField full(image.height(), image.width(), field.bases(), 1);
  parallel_for(image.pixel_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const Rgb x = image.pixel(p);
      const Rgb g = upstream.pixel(p);
      auto dst = full.location(p);
      for (std::size_t k = 0; k < luts.size(); ++k) {
        const Rgb o = lutforge::apply(luts[k], x);
        dst[k] = g[0] * o[0] + g[1] * o[1] + g[2] * o[2];
      }
    }
  });
  return upsample_adjoint(full, field);
}

std::vector<std::vector<double>> bank_gradients(const LutBank& luts, const ModulationField& field,
                                                const ImageBuffer& image, const ImageBuffer& upstream) {
  check_bank(luts, field, image, "bank_gradients");
  require_same_shape(image, upstream, "bank_gradients");
  const ModulationField full = full_resolution(field, image);
  std::vector<std::vector<double>> grads(luts.size());
  parallel_for(luts.size(), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t k = kb; k < ke; ++k) {
      std::vector<double>& acc = grads[k];
      acc.assign(luts[k].values().size(), 0.0);
      for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        const double m = full.location(p)[k];
        if (m == 0.0) continue;
        const Rgb g = upstream.pixel(p);
        const Rgb scaled{m * g[0], m * g[1], m * g[2]};
        for (const auto& vg : vertex_gradients(luts[k], image.pixel(p), scaled)) {
          acc[3 * vg.vertex] += vg.grad[0];
          acc[3 * vg.vertex + 1] += vg.grad[1];
          acc[3 * vg.vertex + 2] += vg.grad[2];
        }
      }
    }
  });
  return grads;
}

ModulationField softmax(const ModulationField& logits) {
  ModulationField out = logits;
  for (std::size_t loc = 0; loc < out.location_count(); ++loc) {
    auto w = out.location(loc);
    const double hi = *std::max_element(w.begin(), w.end());
    double total = 0.0;
    for (double& v : w) {
      v = std::exp(v - hi);
      total += v;
    }
    for (double& v : w) v /= total;
  }
  return out;
}

ModulationField softmax_backward(const ModulationField& probabilities, const ModulationField& grad) {
  if (!probabilities.same_shape(grad)) throw DimensionMismatch("softmax_backward: shape mismatch");
  ModulationField out = grad;
  for (std::size_t loc = 0; loc < out.location_count(); ++loc) {
    const auto p = probabilities.location(loc);
    const auto g = grad.location(loc);
    double dot = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) dot += p[k] * g[k];
    auto dst = out.location(loc);
    for (std::size_t k = 0; k < p.size(); ++k) dst[k] = p[k] * (g[k] - dot);
  }
  return out;
}

ModulationField luminance_router(const ImageBuffer& image, int bases, double temperature, int radius) {
  require_tag(image, ColorSpace::Srgb, "luminance_router");
  if (bases < 1) throw InvalidArgument("luminance_router: K must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("luminance_router: temperature must be > 0");
  }
  if (radius < 0) throw InvalidArgument("luminance_router: radius must be >= 0");

  const int h = image.height();
  const int w = image.width();
  std::vector<double> luma(image.pixel_count());
  for (std::size_t p = 0; p < luma.size(); ++p) {
    const Rgb c = image.pixel(p);
    luma[p] = 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2];
  }

  ModulationField logits(h, w, bases, 1);
  parallel_for(std::size_t(h), [&](std::size_t begin, std::size_t end) {
    for (std::size_t ri = begin; ri < end; ++ri) {
      const int i = int(ri);
      for (int j = 0; j < w; ++j) {
        double sum = 0.0;
        int count = 0;
        for (int y = std::max(0, i - radius); y <= std::min(h - 1, i + radius); ++y)
          for (int x = std::max(0, j - radius); x <= std::min(w - 1, j + radius); ++x) {
            sum += luma[std::size_t(y) * w + x];
            ++count;
          }
        const double mean = sum / count;
        for (int k = 0; k < bases; ++k) {
          const double anchor = (k + 0.5) / bases;
          const double d = mean - anchor;
          logits.at(i, j, k) = -d * d / temperature;
        }
      }
    }
  });
  return softmax(logits);
}

ImageBuffer field_slice(const ModulationField& field, int k) {
  if (k < 0 || k >= field.bases()) throw InvalidArgument("field_slice: basis index out of range");
  ImageBuffer out(field.height(), field.width(), ColorSpace::Srgb);
  for (std::size_t loc = 0; loc < field.location_count(); ++loc) {
    const double v = field.location(loc)[std::size_t(k)];
    out.set_pixel(loc, {v, v, v});
  }
  return out;
}

ModulationField read_field(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader reader(bytes, "MODF");
  reader.expect_magic("MODF");
  const std::uint32_t h = reader.u32("height");
  const std::uint32_t w = reader.u32("width");
  const std::uint32_t k = reader.u32("K");
  const std::uint32_t s = reader.u32("scale");
  if (h == 0 || w == 0 || k == 0 || s == 0 || h > (1u << 16) || w > (1u << 16) || k > 1024) {
    reader.fail("invalid field header");
  }
  if (std::uint64_t(h) * w * k * 4 != bytes.size() - reader.offset()) reader.fail("payload size mismatch");
  ModulationField field{int(h), int(w), int(k), int(s)};
  for (double& v : field.values()) {
    v = reader.f32("weights");
    if (!std::isfinite(v)) reader.fail("non-finite weight");
  }
  reader.expect_end();
  return field;
}

void write_field(const ModulationField& field, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("MODF");
  w.u32(std::uint32_t(field.height()));
  w.u32(std::uint32_t(field.width()));
  w.u32(std::uint32_t(field.bases()));
  w.u32(std::uint32_t(field.scale()));
  for (double v : field.values()) w.f32(float(v));
  detail::write_file_bytes(path, w.bytes());
}

}  // namespace lutforge
