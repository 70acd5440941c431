#pragma once

#include <functional>

#include "fieldgen/fieldnet/adam.hpp"
#include "fieldgen/fieldnet/embedding.hpp"
#include "fieldgen/fieldnet/mlp.hpp"
#include "fieldgen/mdp/env.hpp"

namespace fieldgen::mdp {

using fieldnet::Activation;
using fieldnet::AdamConfig;
using fieldnet::AdamState;

/// Normalized quadrature mean: trapezoid of x f(x) over trapezoid of f on
/// [lo, hi]. Throws when the mass integral falls below 1e-12. Invariant under
/// positive rescaling of f.
double quadrature_mean(const std::function<double(double)>& f, double lo, double hi, int nodes);

struct ReturnModelConfig {
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::Tanh;
  int embed_dim = 8;               // discrete-state embedding width
  bool condition_on_action = false;
  double x_min = 0.0;
  double x_max = 1.0;
  double xi = 0.01;                // terminal draw noise (standard deviation)
  double epsilon = 1e-3;           // kernel variance in the terminal matching losses
  double gamma = 0.99;
  /// Output-bias init of the scalar net. Negative so the field starts near
  /// zero density everywhere; return regions never visited by data keep no
  /// spurious mass.
  double s_bias_init = -4.0;
  /// Scale bootstrapped gradient targets by 1/gamma^2 (the change-of-variable
  /// factor of the differentiated return identity) instead of leaving them
  /// unscaled.
  bool chain_rule_gamma = false;
  AdamConfig adam{};

  void validate() const;
};

/// Per-state (or per state-action) return-distribution model: a scalar-field
/// network s(x | z) and gradient-field network g(x | z) over the 1-D return
/// variable x, conditioned on a state embedding (tabular environments) or on
/// normalized observation features, optionally with a one-hot action
/// appended. Each network owns its embedding table.
class ReturnModel {
 public:
  ReturnModel(int num_states, int num_actions, const ReturnModelConfig& cfg,
              numkit::RngStream& rng);
  ReturnModel(const Vec& obs_scale, int num_actions, const ReturnModelConfig& cfg,
              numkit::RngStream& rng);

  const ReturnModelConfig& config() const { return cfg_; }
  bool discrete() const { return discrete_; }
  int num_actions() const { return num_actions_; }

  /// Conditioning vector for the g network (embedding or features, plus the
  /// action one-hot when configured). action < 0 means state-only.
  Vec g_condition(const RlObservation& z, int action) const;
  Vec s_condition(const RlObservation& z, int action) const;

  double s_value(double x, const RlObservation& z, int action) const;
  double g_value(double x, const RlObservation& z, int action) const;

  /// Normalized quadrature mean of x under s(x | z, a) over [x_min, x_max].
  /// Throws when the mass integral falls below 1e-12.
  double expected_return(const RlObservation& z, int action, int quad_nodes = 65) const;

  struct Weights {
    Vec g_params, s_params, g_embed, s_embed;
  };
  Weights weights() const;
  void set_weights(const Weights& w);

  /// Adjust the optimizer step size mid-run (lr schedules).
  void set_learning_rate(double lr);

  struct UpdateStats {
    double loss_grad = 0.0;
    double loss_id = 0.0;
    int range_warnings = 0;
  };

  struct BootstrapTargets {
    double query = 0.0;  // (x - r) / gamma fed to the target fields
    double g_tgt = 0.0;
    double s_tgt = 0.0;
    bool out_of_range = false;
  };

  /// Targets of the non-terminal regression at return coordinate x: the
  /// target copy's fields at (x - r) / gamma, the scalar one scaled by
  /// 1/gamma (and the gradient one by 1/gamma^2 under chain_rule_gamma).
  /// Queries outside [x_min, x_max] are flagged but still evaluated.
  BootstrapTargets bootstrap_targets(const ReturnModel& target, double x, double reward,
                                     const RlObservation& next_obs, int next_action) const;

  /// One optimizer step on the batch: transitions that end the episode anchor
  /// the model with draws x ~ N(reward, xi^2) through the sliced matching
  /// losses; the rest regress toward the target copy's fields evaluated at
  /// the shifted-scaled return (x - r) / gamma.
  UpdateStats update(const std::vector<RlTransition>& batch, const ReturnModel& target,
                     numkit::RngStream& rng);

 private:
  void build_networks(int cond_dim, numkit::RngStream& rng);
  Vec condition_impl(const RlObservation& z, int action, const fieldnet::Embedding& embed) const;
  double normalize_x(double x) const;
  double x_input_scale() const;

  ReturnModelConfig cfg_;
  bool discrete_ = true;
  int num_actions_ = 1;
  Vec obs_scale_;

  fieldnet::MlpSpec g_spec_, s_spec_;
  Vec g_params_, s_params_;
  fieldnet::Embedding g_embed_, s_embed_;

  AdamState g_adam_, s_adam_, g_embed_adam_, s_embed_adam_;
};

}  // namespace fieldgen::mdp
