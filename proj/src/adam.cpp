#include <cmath>
#include <numbers>
#include <string>

#include "lutforge/error.hpp"
#include "lutforge/optim.hpp"

namespace lutforge {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               const AdamParams& hp) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionMismatch("adam_step: parameter, gradient and state sizes differ");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Divergence("adam_step: non-finite gradient at parameter " + std::to_string(i), state.t + 1);
    }
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(hp.beta1, double(state.t));
  const double c2 = 1.0 - std::pow(hp.beta2, double(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + hp.epsilon);
  }
}

double cosine_lr(long step, long total, double lr_max, double lr_min) {
  if (total < 1) throw InvalidArgument("cosine_lr: total must be >= 1");
  if (step < 0 || step > total) {
    throw InvalidArgument("cosine_lr: step " + std::to_string(step) + " outside [0, " + std::to_string(total) + "]");
  }
  if (step == 0) return lr_max;
  if (step == total) return lr_min;
  const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * double(step) / double(total)));
  return lr_min + (lr_max - lr_min) * w;
}

}  // namespace lutforge
