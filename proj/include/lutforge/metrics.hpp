#pragma once

#include <string>

#include "lutforge/image.hpp"

namespace lutforge {

/// Fixed SSIM parameters: 11x11 Gaussian window, sigma 1.5, K1 = 0.01,
/// K2 = 0.03, dynamic range 1. Windows are evaluated in "valid" mode only.
struct SsimParams {
  static constexpr int kWindow = 11;
  static constexpr double kSigma = 1.5;
  static constexpr double kK1 = 0.01;
  static constexpr double kK2 = 0.03;
  static constexpr double kC1 = kK1 * kK1;
  static constexpr double kC2 = kK2 * kK2;
};

struct MetricReport {
  double psnr = 0.0;  ///< dB; +infinity for identical images
  double ssim = 0.0;
};

/// 10 * log10(1 / MSE) over all channels jointly.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean local SSIM of the channel-mean grayscale images.
/// Throws InvalidArgument if either side is smaller than the window.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

struct SsimGradient {
  double value = 0.0;
  ImageBuffer grad;  ///< d ssim(reference, test) / d test, per channel
};

SsimGradient ssim_with_gradient(const ImageBuffer& reference, const ImageBuffer& test);

MetricReport evaluate(const ImageBuffer& a, const ImageBuffer& b);

/// Formats a report as "PSNR=<val> SSIM=<val>" (four decimals, trailing zeros trimmed).
std::string format_report(const MetricReport& report);

}  // namespace lutforge
