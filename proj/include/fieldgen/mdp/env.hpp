#pragma once

#include <memory>
#include <tuple>

#include "fieldgen/mdp/cartpole.hpp"
#include "fieldgen/mdp/tabular.hpp"

namespace fieldgen::mdp {

/// What the agent sees: a state index for tabular environments, a feature
/// vector for continuous ones.
struct RlObservation {
  int state_index = -1;
  Vec features;
};

/// One replayable step. next_action carries the conditioning action of the
/// bootstrap target (< 0 for state-only models); done marks episode end, in
/// which case the return from obs is exactly reward.
struct RlTransition {
  RlObservation obs;
  int action = 0;
  double reward = 0.0;  // scaled into the model's return range
  RlObservation next_obs;
  int next_action = -1;
  bool done = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual RlObservation reset(RngStream& rng) = 0;
  virtual std::tuple<RlObservation, double, bool> step(int action, RngStream& rng) = 0;
  virtual int num_actions() const = 0;
  /// > 0 for tabular environments (embedding-conditioned models).
  virtual int num_states() const { return 0; }
  /// Per-feature scale used to normalize continuous observations.
  virtual Vec obs_scale() const { return {}; }
  /// Raw per-episode return is divided by this to land in [0, 1].
  virtual double return_scale() const { return 1.0; }
  virtual std::unique_ptr<Env> clone() const = 0;
};

class FrozenLakeEnv : public Env {
 public:
  explicit FrozenLakeEnv(FrozenLake lake) : lake_(std::move(lake)) {}
  static FrozenLakeEnv standard(bool slippery = true, double gamma = 0.95) {
    return FrozenLakeEnv(FrozenLake::make(FrozenLake::default_map_4x4(), slippery, gamma));
  }

  RlObservation reset(RngStream&) override {
    state_ = lake_.start_state;
    return {state_, {}};
  }
  std::tuple<RlObservation, double, bool> step(int action, RngStream& rng) override {
    const StepResult r = mdp_step(lake_.mdp, state_, action, rng);
    state_ = r.next_state;
    return {RlObservation{state_, {}}, r.reward, r.done};
  }
  int num_actions() const override { return lake_.mdp.num_actions; }
  int num_states() const override { return lake_.mdp.num_states; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<FrozenLakeEnv>(*this); }

  const FrozenLake& lake() const { return lake_; }

 private:
  FrozenLake lake_;
  int state_ = 0;
};

class CartPoleEnv : public Env {
 public:
  explicit CartPoleEnv(CartPoleConfig cfg = {}) : cfg_(cfg) {}

  RlObservation reset(RngStream& rng) override {
    state_ = cartpole_reset(rng);
    steps_ = 0;
    return {-1, state_.as_vec()};
  }
  std::tuple<RlObservation, double, bool> step(int action, RngStream&) override {
    const CartPoleStep r = cartpole_step(state_, action, cfg_);
    state_ = r.next;
    ++steps_;
    const bool done = r.done || steps_ >= cfg_.max_steps;
    return {RlObservation{-1, state_.as_vec()}, r.reward, done};
  }
  int num_actions() const override { return 2; }
  Vec obs_scale() const override { return {2.4, 3.0, 0.21, 3.0}; }
  double return_scale() const override { return static_cast<double>(cfg_.max_steps); }
  std::unique_ptr<Env> clone() const override { return std::make_unique<CartPoleEnv>(*this); }

  const CartPoleConfig& config() const { return cfg_; }

 private:
  CartPoleConfig cfg_;
  CartPoleState state_;
  int steps_ = 0;
};

}  // namespace fieldgen::mdp
