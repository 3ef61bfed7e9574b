#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lutforge/image.hpp"
#include "lutforge/metrics.hpp"
#include "lutforge/modulation.hpp"
#include "lutforge/objective.hpp"

namespace lutforge {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

/// First/second moment estimates and the step counter of one Adam run.
struct AdamState {
  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}

  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
};

/// One bias-corrected Adam update, in place:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps).
/// Throws DimensionMismatch on shape disagreement and Divergence on a
/// non-finite gradient (parameters are left untouched in that case).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               const AdamParams& hp = {});

/// lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total)) / 2, exact at both ends.
double cosine_lr(long step, long total, double lr_max, double lr_min);

struct FitConfig {
  long steps = 2000;
  double lr_max = 4e-4;
  double lr_min = 1e-6;
  AdamParams adam;
  LossWeights weights;
  int bases = 8;         ///< K
  int lut_size = 17;     ///< N
  int field_scale = 8;   ///< spatial field resolution divisor
  bool spatial = true;   ///< false: one coefficient vector shared by all pixels
  bool softmax = false;  ///< parametrize the field through a per-location softmax
  std::uint64_t seed = 0;
  double s_min = kDefaultLogScaleMin;
  double s_max = kDefaultLogScaleMax;

  /// Throws InvalidArgument when a value is out of its allowed range.
  void validate() const;
};

/// Plain-text `key = value` config, one entry per line, `#` comments.
/// Unknown keys and malformed values raise ParseError with the line number.
FitConfig parse_fit_config(const std::string& text);
FitConfig read_fit_config(const std::filesystem::path& path);
std::string format_fit_config(const FitConfig& config);

struct FitResult {
  LutBank luts;
  ModulationField field;  ///< effective blend weights (post-softmax when enabled)
  UncertaintyMap uncertainty;
  std::vector<double> loss_trace;  ///< total loss before each update
  std::vector<double> lr_trace;
  std::vector<double> init_offsets;  ///< per-basis constant offset added at init
  ImageBuffer output;               ///< clamped blend of the fitted model
  MetricReport metrics;             ///< output vs target
};

/// Per-basis symmetry-breaking offsets 0.01 * (2k - (K - 1)) / K; they sum to zero.
std::vector<double> init_offsets(int bases);

/// Jointly fits a LUT bank, a modulation field and an uncertainty map so that
/// clamp(blend(luts, field, input)) approximates `target`, minimizing
/// total_loss with Adam under a cosine learning-rate schedule.
FitResult fit(const ImageBuffer& input, const ImageBuffer& target, const FitConfig& config);

/// Writes lut_XX.cube, field.modf, uncertainty.uncm, uncertainty.png,
/// output.png, loss.csv and fit.cfg into `dir` (created if missing).
void write_fit_artifacts(const FitResult& result, const FitConfig& config, const std::filesystem::path& dir);

/// CSV loss trace: header "step,lr,loss" and one row per step.
std::string format_loss_csv(const FitResult& result);

}  // namespace lutforge
