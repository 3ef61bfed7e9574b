#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "lutforge/image.hpp"

namespace lutforge {

inline constexpr double kDefaultLogScaleMin = -6.0;
inline constexpr double kDefaultLogScaleMax = 6.0;

/// Per-pixel, per-channel log-scale s = log b of the Laplace residual model.
class UncertaintyMap {
public:
  UncertaintyMap() = default;
  UncertaintyMap(int height, int width, double fill = 0.0, double s_min = kDefaultLogScaleMin,
                 double s_max = kDefaultLogScaleMax);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  double s_min() const noexcept { return s_min_; }
  double s_max() const noexcept { return s_max_; }

  double& at(int row, int col, int channel) { return s_[(std::size_t(row) * width_ + col) * 3 + channel]; }
  double at(int row, int col, int channel) const { return s_[(std::size_t(row) * width_ + col) * 3 + channel]; }

  std::span<double> values() & noexcept { return s_; }
  std::span<const double> values() const& noexcept { return s_; }
  std::span<const double> values() const&& = delete;

  /// Project every entry back into [s_min, s_max].
  void clamp();

private:
  int height_ = 0;
  int width_ = 0;
  double s_min_ = kDefaultLogScaleMin;
  double s_max_ = kDefaultLogScaleMax;
  std::vector<double> s_;
};

/// r = y - y_hat, elementwise. The result is tagged like `y`.
ImageBuffer residual(const ImageBuffer& y, const ImageBuffer& y_hat);

/// Sums over every element, reduced with `tree_sum`.
double l1_loss(const ImageBuffer& r);
double l2_loss(const ImageBuffer& r);

/// Laplace negative log-likelihood with one shared scale b:
/// sum(|r| / b + log b). Throws InvalidArgument for b <= 0.
double homoscedastic_nll(const ImageBuffer& r, double b);

/// sum_{i,c} (exp(-s) * |y - y_hat| + s).
double unu_loss(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s);

struct UnuGradients {
  ImageBuffer d_prediction;  ///< -exp(-s) * sign(y - y_hat); 0 where the residual is 0
  UncertaintyMap d_log_scale;  ///< 1 - exp(-s) * |y - y_hat|
};

UnuGradients unu_gradients(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s);

/// Weights of the training objective. The perceptual weight is accepted so
/// configs can carry it, but the perceptual term itself is not evaluated.
struct LossWeights {
  double perceptual = 0.1;
  double ssim = 0.1;
  double unu = 0.1;

  void validate() const;
};

struct LossBreakdown {
  double l1 = 0.0;    ///< mean absolute residual
  double ssim = 0.0;  ///< 1 - SSIM(y, y_hat)
  double unu = 0.0;   ///< unu_loss / element count
  double total = 0.0;
};

/// L1 + w_ssim * (1 - SSIM) + w_unu * UNU, with the L1 and UNU sums
/// normalised by the element count. The SSIM term is skipped when its weight is 0.
LossBreakdown total_loss(const ImageBuffer& y, const ImageBuffer& y_hat, const UncertaintyMap& s,
                         const LossWeights& weights);

/// Channel mean of s rescaled so the map's minimum maps to 0 and maximum to 1
/// (a constant map gives 0.5). Returned as a gray sRGB image.
ImageBuffer export_uncertainty(const UncertaintyMap& s);

/// UNCM binary: "UNCM", u32 H, W, then H * W * 3 float32.
UncertaintyMap read_uncertainty(const std::filesystem::path& path);
void write_uncertainty(const UncertaintyMap& s, const std::filesystem::path& path);

}  // namespace lutforge
