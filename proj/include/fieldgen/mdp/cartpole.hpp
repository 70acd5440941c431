#pragma once

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::mdp {

/// Classic-control cart-pole constants: a cart on a frictionless track with
/// an inverted pole, force of fixed magnitude applied left or right, Euler
/// integration. An episode ends when the pole falls past 12 degrees, the
/// cart leaves +-2.4, or the 500-step cap is reached; every step pays 1.
struct CartPoleConfig {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_pole_length = 0.5;
  double force_mag = 10.0;
  double tau = 0.02;  // integration step, seconds
  double theta_threshold = 12.0 * 2.0 * M_PI / 360.0;
  double x_threshold = 2.4;
  int max_steps = 500;
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  numkit::Vec as_vec() const { return {x, x_dot, theta, theta_dot}; }
};

/// Uniform(-0.05, 0.05) on all four coordinates.
CartPoleState cartpole_reset(numkit::RngStream& rng);

struct CartPoleStep {
  CartPoleState next;
  double reward = 1.0;
  bool done = false;  // physics termination only; the step cap is the caller's
};

/// One Euler step under action 0 (push left) or 1 (push right). Throws on a
/// non-finite state.
CartPoleStep cartpole_step(const CartPoleState& state, int action,
                           const CartPoleConfig& cfg = {});

bool cartpole_terminal(const CartPoleState& state, const CartPoleConfig& cfg = {});

}  // namespace fieldgen::mdp
