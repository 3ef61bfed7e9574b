#include "lutforge/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "lutforge/error.hpp"
#include "lutforge/parallel.hpp"

namespace lutforge {
namespace {

constexpr int kWin = SsimParams::kWindow;

std::array<double, kWin> gaussian_taps() {
  std::array<double, kWin> taps{};
  double total = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * SsimParams::kSigma * SsimParams::kSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Plane(int h_, int w_) : h(h_), w(w_), v(std::size_t(h_) * std::size_t(w_), 0.0) {}
  double& operator()(int i, int j) { return v[std::size_t(i) * w + j]; }
  double operator()(int i, int j) const { return v[std::size_t(i) * w + j]; }
};

Plane gray(const ImageBuffer& img) {
  Plane out(img.height(), img.width());
  const auto src = img.values();
  for (std::size_t p = 0; p < out.v.size(); ++p) out.v[p] = (src[3 * p] + src[3 * p + 1] + src[3 * p + 2]) / 3.0;
  return out;
}

// Valid-mode separable correlation with the Gaussian window.
Plane filter_valid(const Plane& in, const std::array<double, kWin>& g) {
  Plane horiz(in.h, in.w - kWin + 1);
  for (int i = 0; i < horiz.h; ++i)
    for (int j = 0; j < horiz.w; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kWin; ++t) acc += g[t] * in(i, j + t);
      horiz(i, j) = acc;
    }
  Plane out(in.h - kWin + 1, horiz.w);
  for (int i = 0; i < out.h; ++i)
    for (int j = 0; j < out.w; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kWin; ++t) acc += g[t] * horiz(i + t, j);
      out(i, j) = acc;
    }
  return out;
}

// Adjoint of filter_valid: scatters a window-grid map back to full size.
Plane filter_valid_adjoint(const Plane& in, int h, int w, const std::array<double, kWin>& g) {
  Plane vert(h, in.w);
  for (int i = 0; i < in.h; ++i)
    for (int j = 0; j < in.w; ++j) {
      const double v = in(i, j);
      for (int t = 0; t < kWin; ++t) vert(i + t, j) += g[t] * v;
    }
  Plane out(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < vert.w; ++j) {
      const double v = vert(i, j);
      for (int t = 0; t < kWin; ++t) out(i, j + t) += g[t] * v;
    }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct WindowStats {
  Plane mx, my, exx, eyy, exy;
};

WindowStats window_stats(const Plane& x, const Plane& y, const std::array<double, kWin>& g) {
  return {filter_valid(x, g), filter_valid(y, g), filter_valid(product(x, x), g), filter_valid(product(y, y), g),
          filter_valid(product(x, y), g)};
}

void check_ssim_inputs(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kWin || a.width() < kWin) {
    throw InvalidArgument("ssim: image " + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                          " is smaller than the " + std::to_string(kWin) + "x" + std::to_string(kWin) + " window");
  }
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "psnr");
  const auto va = a.values();
  const auto vb = b.values();
  const double sse = tree_sum(0, va.size(), [&](std::size_t i) {
    const double d = va[i] - vb[i];
    return d * d;
  });
  const double mse = sse / double(va.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  check_ssim_inputs(a, b);
  const auto g = gaussian_taps();
  const WindowStats st = window_stats(gray(a), gray(b), g);
  const std::size_t n = st.mx.v.size();
  const double total = tree_sum(0, n, [&](std::size_t p) {
    const double mx = st.mx.v[p];
    const double my = st.my.v[p];
    const double sxx = st.exx.v[p] - mx * mx;
    const double syy = st.eyy.v[p] - my * my;
    const double sxy = st.exy.v[p] - mx * my;
    const double num = (2.0 * mx * my + SsimParams::kC1) * (2.0 * sxy + SsimParams::kC2);
    const double den = (mx * mx + my * my + SsimParams::kC1) * (sxx + syy + SsimParams::kC2);
    return num / den;
  });
  return total / double(n);
}

SsimGradient ssim_with_gradient(const ImageBuffer& reference, const ImageBuffer& test) {
  check_ssim_inputs(reference, test);
  const auto g = gaussian_taps();
  const Plane x = gray(reference);
  const Plane y = gray(test);
  const WindowStats st = window_stats(x, y, g);
  const std::size_t n = st.mx.v.size();
  const double inv_n = 1.0 / double(n);

  Plane d_my(st.mx.h, st.mx.w), d_eyy(st.mx.h, st.mx.w), d_exy(st.mx.h, st.mx.w);
  const double total = tree_sum(0, n, [&](std::size_t p) {
    const double mx = st.mx.v[p];
    const double my = st.my.v[p];
    const double sxx = st.exx.v[p] - mx * mx;
    const double syy = st.eyy.v[p] - my * my;
    const double sxy = st.exy.v[p] - mx * my;
    const double a1 = 2.0 * mx * my + SsimParams::kC1;
    const double a2 = 2.0 * sxy + SsimParams::kC2;
    const double b1 = mx * mx + my * my + SsimParams::kC1;
    const double b2 = sxx + syy + SsimParams::kC2;
    const double s = (a1 * a2) / (b1 * b2);
    d_my.v[p] = inv_n * ((2.0 * mx * a2 - 2.0 * mx * a1) / (b1 * b2) - s * (2.0 * my / b1 - 2.0 * my / b2));
    d_eyy.v[p] = inv_n * (-s / b2);
    d_exy.v[p] = inv_n * (2.0 * a1 / (b1 * b2));
    return s;
  });

  const Plane ga = filter_valid_adjoint(d_my, y.h, y.w, g);
  const Plane gb = filter_valid_adjoint(d_eyy, y.h, y.w, g);
  const Plane gc = filter_valid_adjoint(d_exy, y.h, y.w, g);

  SsimGradient out{total * inv_n, ImageBuffer(test.height(), test.width(), ColorSpace::Srgb)};
  auto dst = out.grad.values();
  for (std::size_t q = 0; q < y.v.size(); ++q) {
    const double dgray = ga.v[q] + 2.0 * y.v[q] * gb.v[q] + x.v[q] * gc.v[q];
    const double per_channel = dgray / 3.0;
    dst[3 * q] = per_channel;
    dst[3 * q + 1] = per_channel;
    dst[3 * q + 2] = per_channel;
  }
  return out;
}

MetricReport evaluate(const ImageBuffer& a, const ImageBuffer& b) { return {psnr(a, b), ssim(a, b)}; }

namespace {

std::string trim_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

}  // namespace

std::string format_report(const MetricReport& report) {
  return "PSNR=" + trim_number(report.psnr) + " SSIM=" + trim_number(report.ssim);
}

}  // namespace lutforge
