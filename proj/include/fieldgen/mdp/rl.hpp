#pragma once

#include <functional>

#include "fieldgen/mdp/c51.hpp"
#include "fieldgen/mdp/return_model.hpp"
#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::mdp {

using numkit::SampleSet;

using Policy = std::function<int(const RlObservation&, RngStream&)>;

struct McResult {
  SampleSet returns;  // discounted raw returns, one per rollout
  int truncated = 0;  // rollouts cut by the step cap
};

/// Monte-Carlo return distribution from full rollouts of the policy.
McResult mc_return_distribution(const Env& env_proto, const Policy& policy, int n_rollouts,
                                double gamma, std::int64_t step_cap, std::uint64_t seed);

enum class RlModelKind { BellmanDiffusion, C51 };

RlModelKind parse_model_kind(const std::string& name);
std::string to_string(RlModelKind kind);

struct RlTrainConfig {
  RlModelKind kind = RlModelKind::BellmanDiffusion;
  std::int64_t env_steps = 20000;
  int batch = 32;
  int replay_capacity = 10000;
  int learn_start = 500;
  int target_refresh = 200;  // 0 = bootstrap from the live model
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::int64_t eps_anneal_steps = 0;  // 0: anneal over the first half of training
  std::int64_t eval_every = 500;
  int eval_episodes = 5;
  std::int64_t episode_cap = 100000;
  double gamma = 0.99;
  int expected_return_quad = 65;
  ReturnModelConfig bd{};
  C51Config c51{};
};

struct CurvePoint {
  std::int64_t env_step = 0;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  double loss_grad = 0.0;  // cross-entropy loss for C51 (loss_id unused)
  double loss_id = 0.0;
  double eps_exploration = 0.0;
};

struct RlTrainResult {
  std::vector<CurvePoint> curve;
};

/// Actor/learner loop: epsilon-greedy acting on the expected return, uniform
/// replay, one model update per environment step, periodic target refresh and
/// greedy evaluation. Deterministic for a fixed seed.
RlTrainResult rl_train(const Env& env_proto, const RlTrainConfig& cfg, std::uint64_t seed);

struct PolicyEvalConfig {
  std::int64_t updates = 8000;
  int batch = 32;
  int target_refresh = 200;
  std::int64_t episode_cap = 10000;
  ReturnModelConfig bd{};
};

/// Learn the per-state return distribution of a fixed policy (the planning
/// update without action selection). Returns the trained state-conditioned
/// model.
ReturnModel bd_evaluate_policy(const Env& env_proto, const Policy& policy,
                               const PolicyEvalConfig& cfg, std::uint64_t seed);

/// W1 between the model's normalized return density at (z, action) and an
/// empirical return sample, via CDFs on a uniform grid over the model's
/// return range.
double return_distribution_w1(const ReturnModel& model, const RlObservation& z, int action,
                              const SampleSet& returns, int grid_nodes = 512);

}  // namespace fieldgen::mdp
