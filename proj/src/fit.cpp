#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "binary_io.hpp"
#include "lutforge/error.hpp"
#include "lutforge/imageio.hpp"
#include "lutforge/optim.hpp"

namespace lutforge {
namespace {

// All trainable values live in one flat vector: [LUT bank | field | log-scales].
struct ParamLayout {
  std::size_t lut_values = 0;  // per LUT
  std::size_t luts = 0;
  std::size_t field = 0;
  std::size_t scales = 0;

  std::size_t field_offset() const { return lut_values * luts; }
  std::size_t scale_offset() const { return field_offset() + field; }
  std::size_t total() const { return scale_offset() + scales; }
};

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct Model {
  LutBank luts;
  ModulationField raw;      // trainable field values (logits in softmax mode)
  ModulationField weights;  // effective blend weights
  UncertaintyMap s;
};

Model unpack(const std::vector<double>& p, const ParamLayout& layout, const FitConfig& cfg,
             const ModulationField& field_shape, int h, int w) {
  Model m{{}, field_shape, field_shape, UncertaintyMap(h, w, 0.0, cfg.s_min, cfg.s_max)};
  m.luts.reserve(layout.luts);
  for (std::size_t k = 0; k < layout.luts; ++k) {
    Lut3d lut(cfg.lut_size);
    std::copy_n(p.begin() + std::ptrdiff_t(k * layout.lut_values), layout.lut_values, lut.values().begin());
    m.luts.push_back(std::move(lut));
  }
  std::copy_n(p.begin() + std::ptrdiff_t(layout.field_offset()), layout.field, m.raw.values().begin());
  m.weights = cfg.softmax ? softmax(m.raw) : m.raw;
  std::copy_n(p.begin() + std::ptrdiff_t(layout.scale_offset()), layout.scales, m.s.values().begin());
  return m;
}

ModulationField make_field_shape(const FitConfig& cfg, int h, int w) {
  const int scale = cfg.spatial ? cfg.field_scale : std::max(h, w);
  return ModulationField((h + scale - 1) / scale, (w + scale - 1) / scale, cfg.bases, scale);
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> init_offsets(int bases) {
  std::vector<double> out(static_cast<std::size_t>(bases));
  for (int k = 0; k < bases; ++k) out[std::size_t(k)] = 0.01 * double(2 * k - (bases - 1)) / double(bases);
  return out;
}

FitResult fit(const ImageBuffer& input, const ImageBuffer& target, const FitConfig& config) {
  config.validate();
  require_tag(input, ColorSpace::Srgb, "fit (input)");
  require_tag(target, ColorSpace::Srgb, "fit (target)");
  require_same_shape(input, target, "fit");
  for (const ImageBuffer* img : {&input, &target}) {
    for (double v : img->values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("fit: image values must lie in [0, 1]");
    }
  }

  const int h = input.height();
  const int w = input.width();
  const ModulationField field_shape = make_field_shape(config, h, w);

  ParamLayout layout;
  layout.luts = std::size_t(config.bases);
  layout.lut_values = 3 * Lut3d(config.lut_size).vertex_count();
  layout.field = field_shape.values().size();
  layout.scales = input.size();

  FitResult result;
  result.init_offsets = init_offsets(config.bases);

  std::vector<double> params(layout.total(), 0.0);
  const Lut3d identity = make_identity(config.lut_size);
  for (std::size_t k = 0; k < layout.luts; ++k) {
    const auto src = identity.values();
    const double offset = result.init_offsets[k];
    for (std::size_t i = 0; i < src.size(); ++i) params[k * layout.lut_values + i] = src[i] + offset;
  }
  // Softmax logits of 0 and raw weights of 1/K both start at the uniform blend.
  const double field_init = config.softmax ? 0.0 : 1.0 / double(config.bases);
  std::fill_n(params.begin() + std::ptrdiff_t(layout.field_offset()), layout.field, field_init);

  AdamState state(params.size());
  std::vector<double> grads(params.size());
  const double n = double(input.size());
  const auto y = target.values();

  result.loss_trace.reserve(std::size_t(config.steps));
  result.lr_trace.reserve(std::size_t(config.steps));

  for (long step = 0; step < config.steps; ++step) {
    const Model model = unpack(params, layout, config, field_shape, h, w);
    const ModulationField full = upsample(model.weights, h, w);
    const ImageBuffer pre = blend_unclamped(model.luts, full, input);
    ImageBuffer y_hat = pre;
    clamp_unit(y_hat);
    const auto yh = y_hat.values();

    // Forward: same terms as total_loss, with the SSIM gradient computed alongside.
    const double l1 = l1_loss(residual(target, y_hat)) / n;
    double ssim_term = 0.0;
    SsimGradient sg;
    if (config.weights.ssim > 0.0) {
      sg = ssim_with_gradient(target, y_hat);
      ssim_term = 1.0 - sg.value;
    }
    double unu_term = 0.0;
    UnuGradients ug;
    if (config.weights.unu > 0.0) {
      unu_term = unu_loss(target, y_hat, model.s) / n;
      ug = unu_gradients(target, y_hat, model.s);
    }
    const double loss = l1 + config.weights.ssim * ssim_term + config.weights.unu * unu_term;
    if (!std::isfinite(loss)) throw Divergence("fit: non-finite loss", step);

    const double lr = cosine_lr(step, config.steps, config.lr_max, config.lr_min);
    result.loss_trace.push_back(loss);
    result.lr_trace.push_back(lr);

    // Backward to the pre-clamp blend.
    ImageBuffer upstream(h, w, ColorSpace::Srgb);
    auto g = upstream.values();
    const auto pv = pre.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
      double d = -sign(y[i] - yh[i]) / n;
      if (config.weights.ssim > 0.0) d -= config.weights.ssim * sg.grad.values()[i];
      if (config.weights.unu > 0.0) d += config.weights.unu * ug.d_prediction.values()[i] / n;
      g[i] = (pv[i] >= 0.0 && pv[i] <= 1.0) ? d : 0.0;
    }

    const auto lut_grads = bank_gradients(model.luts, full, input, upstream);
    for (std::size_t k = 0; k < layout.luts; ++k) {
      std::copy(lut_grads[k].begin(), lut_grads[k].end(), grads.begin() + std::ptrdiff_t(k * layout.lut_values));
    }
    ModulationField field_grad = field_gradients(model.luts, model.weights, input, upstream);
    if (config.softmax) field_grad = softmax_backward(model.weights, field_grad);
    std::copy(field_grad.values().begin(), field_grad.values().end(),
              grads.begin() + std::ptrdiff_t(layout.field_offset()));
    auto scale_grads = grads.begin() + std::ptrdiff_t(layout.scale_offset());
    if (config.weights.unu > 0.0) {
      const auto gs = ug.d_log_scale.values();
      for (std::size_t i = 0; i < layout.scales; ++i) scale_grads[std::ptrdiff_t(i)] = config.weights.unu * gs[i] / n;
    } else {
      std::fill_n(scale_grads, layout.scales, 0.0);
    }

    try {
      adam_step(params, grads, state, lr, config.adam);
    } catch (const Divergence&) {
      throw Divergence("fit: non-finite gradient", step);
    }
    if (!std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); })) {
      throw Divergence("fit: non-finite parameter", step);
    }
    for (std::size_t i = layout.scale_offset(); i < layout.total(); ++i) {
      params[i] = std::clamp(params[i], config.s_min, config.s_max);
    }
  }

  Model model = unpack(params, layout, config, field_shape, h, w);
  for (const Lut3d& lut : model.luts) {
    if (!lut.all_finite()) throw Divergence("fit: non-finite LUT vertex", config.steps);
  }
  result.output = blend(model.luts, model.weights, input);
  result.metrics = {psnr(result.output, target),
                    (h >= SsimParams::kWindow && w >= SsimParams::kWindow) ? ssim(result.output, target) : 0.0};
  result.luts = std::move(model.luts);
  result.field = std::move(model.weights);
  result.uncertainty = std::move(model.s);
  return result;
}

std::string format_loss_csv(const FitResult& result) {
  std::string out = "step,lr,loss\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    out += std::to_string(i) + "," + real(result.lr_trace[i]) + "," + real(result.loss_trace[i]) + "\n";
  }
  return out;
}

void write_fit_artifacts(const FitResult& result, const FitConfig& config, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  for (std::size_t k = 0; k < result.luts.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "lut_%02zu.cube", k);
    write_cube(result.luts[k], dir / name, "basis " + std::to_string(k));
  }
  write_field(result.field, dir / "field.modf");
  write_uncertainty(result.uncertainty, dir / "uncertainty.uncm");
  save_png_gray(export_uncertainty(result.uncertainty), dir / "uncertainty.png");
  save_png(result.output, dir / "output.png");

  const std::string csv = format_loss_csv(result);
  detail::write_file_bytes(dir / "loss.csv", {csv.begin(), csv.end()});

  std::string cfg = format_fit_config(config);
  cfg += "# init_offsets =";
  for (double o : result.init_offsets) cfg += " " + real(o);
  cfg += "\n# final " + format_report(result.metrics) + "\n";
  detail::write_file_bytes(dir / "fit.cfg", {cfg.begin(), cfg.end()});
}

}  // namespace lutforge
