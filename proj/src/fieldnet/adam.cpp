#include "fieldgen/fieldnet/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::fieldnet {

void AdamConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("Adam: learning_rate must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("Adam: beta1 must be in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("Adam: beta2 must be in [0,1)");
  if (!(eps_hat > 0.0)) throw std::invalid_argument("Adam: eps_hat must be > 0");
}

AdamState AdamState::make(std::size_t param_count, const AdamConfig& cfg) {
  cfg.validate();
  AdamState st;
  st.cfg = cfg;
  st.m.assign(param_count, 0.0);
  st.v.assign(param_count, 0.0);
  st.step = 0;
  return st;
}

void adam_step(Vec& params, const Vec& grad, AdamState& state) {
  if (params.size() != grad.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double b1 = state.cfg.beta1;
  const double b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.cfg.learning_rate;
  const double eps = state.cfg.eps_hat;
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace fieldgen::fieldnet
