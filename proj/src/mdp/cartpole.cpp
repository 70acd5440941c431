#include "fieldgen/mdp/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::mdp {

CartPoleState cartpole_reset(numkit::RngStream& rng) {
  CartPoleState s;
  s.x = rng.uniform(-0.05, 0.05);
  s.x_dot = rng.uniform(-0.05, 0.05);
  s.theta = rng.uniform(-0.05, 0.05);
  s.theta_dot = rng.uniform(-0.05, 0.05);
  return s;
}

bool cartpole_terminal(const CartPoleState& s, const CartPoleConfig& cfg) {
  return std::abs(s.x) > cfg.x_threshold || std::abs(s.theta) > cfg.theta_threshold;
}

CartPoleStep cartpole_step(const CartPoleState& state, int action, const CartPoleConfig& cfg) {
  if (action != 0 && action != 1) throw std::invalid_argument("cartpole_step: action must be 0/1");
  if (!std::isfinite(state.x) || !std::isfinite(state.x_dot) || !std::isfinite(state.theta) ||
      !std::isfinite(state.theta_dot)) {
    throw std::runtime_error("cartpole_step: non-finite state");
  }
  const double force = action == 1 ? cfg.force_mag : -cfg.force_mag;
  const double total_mass = cfg.cart_mass + cfg.pole_mass;
  const double pole_mass_length = cfg.pole_mass * cfg.half_pole_length;

  const double cos_t = std::cos(state.theta);
  const double sin_t = std::sin(state.theta);
  const double temp =
      (force + pole_mass_length * state.theta_dot * state.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (cfg.gravity * sin_t - cos_t * temp) /
      (cfg.half_pole_length * (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  CartPoleStep out;
  out.next.x = state.x + cfg.tau * state.x_dot;
  out.next.x_dot = state.x_dot + cfg.tau * x_acc;
  out.next.theta = state.theta + cfg.tau * state.theta_dot;
  out.next.theta_dot = state.theta_dot + cfg.tau * theta_acc;
  out.reward = 1.0;
  out.done = cartpole_terminal(out.next, cfg);
  return out;
}

}  // namespace fieldgen::mdp
