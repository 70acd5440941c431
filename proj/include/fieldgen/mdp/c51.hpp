#pragma once

#include "fieldgen/fieldnet/adam.hpp"
#include "fieldgen/fieldnet/mlp.hpp"
#include "fieldgen/mdp/env.hpp"

namespace fieldgen::mdp {

struct C51Config {
  int atoms = 51;
  double x_min = 0.0;
  double x_max = 1.0;
  double gamma = 0.99;
  std::vector<int> hidden{64, 64};  // function-approximation variant only
  fieldnet::AdamConfig adam{};

  void validate() const;
};

/// Distribute the mass of one target atom value onto the fixed support
/// (clamping outside values to the edge atoms, splitting between the two
/// neighbours in proportion to proximity). probs_out accumulates.
void c51_project_atom(const Vec& support, double value, double mass, Vec& probs_out);

/// Project the full shifted-scaled distribution r + gamma * support.
Vec c51_project(const Vec& support, const Vec& next_probs, double reward, double gamma,
                double x_min, double x_max);

/// Categorical return-distribution baseline. Tabular environments store one
/// logit row per (state, action); continuous environments use an MLP from
/// normalized observations to num_actions * atoms logits. Probabilities are
/// softmax outputs, so every distribution stays normalized by construction.
class C51Model {
 public:
  C51Model(int num_states, int num_actions, const C51Config& cfg, numkit::RngStream& rng);
  C51Model(const Vec& obs_scale, int num_actions, const C51Config& cfg, numkit::RngStream& rng);

  const C51Config& config() const { return cfg_; }
  const Vec& support() const { return support_; }
  int num_actions() const { return num_actions_; }

  Vec probs(const RlObservation& z, int action) const;
  double expected_value(const RlObservation& z, int action) const;

  struct Weights {
    Vec params;
  };
  Weights weights() const { return {params_}; }
  void set_weights(const Weights& w);

  /// Cross-entropy step toward the projected target distribution  of
  /// r + gamma X', with X' read from the target copy at (z', a').
  /// Episode-ending transitions project the point mass at r.
  double update(const std::vector<RlTransition>& batch, const C51Model& target,
                numkit::RngStream& rng);

 private:
  Vec logits(const RlObservation& z) const;  // num_actions * atoms
  Vec features(const RlObservation& z) const;

  C51Config cfg_;
  bool discrete_ = true;
  int num_states_ = 0;
  int num_actions_ = 1;
  Vec obs_scale_;
  Vec support_;

  // tabular: logits table [state][action][atom] flattened; mlp: network params
  fieldnet::MlpSpec spec_;
  Vec params_;
  fieldnet::AdamState adam_;
};

}  // namespace fieldgen::mdp
