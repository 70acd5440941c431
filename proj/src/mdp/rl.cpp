#include "fieldgen/mdp/rl.hpp"

#include <algorithm>
#include <cmath>

namespace fieldgen::mdp {

McResult mc_return_distribution(const Env& env_proto, const Policy& policy, int n_rollouts,
                                double gamma, std::int64_t step_cap, std::uint64_t seed) {
  if (n_rollouts < 1) throw std::invalid_argument("mc_return_distribution: n_rollouts >= 1");
  McResult result;
  result.returns.source_label = "mc-returns";
  result.returns.seed = seed;
  result.returns.points.reserve(static_cast<std::size_t>(n_rollouts));
  for (int k = 0; k < n_rollouts; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    auto env = env_proto.clone();
    RlObservation obs = env->reset(rng);
    double ret = 0.0;
    double discount = 1.0;
    bool done = false;
    std::int64_t t = 0;
    while (!done && t < step_cap) {
      const int a = policy(obs, rng);
      auto [next, reward, is_done] = env->step(a, rng);
      ret += discount * reward;
      discount *= gamma;
      obs = next;
      done = is_done;
      ++t;
    }
    if (!done) result.truncated += 1;
    result.returns.points.push_back({ret});
  }
  return result;
}

RlModelKind parse_model_kind(const std::string& name) {
  if (name == "bellman-diffusion") return RlModelKind::BellmanDiffusion;
  if (name == "c51") return RlModelKind::C51;
  throw std::invalid_argument("unknown model kind: " + name + " (use bellman-diffusion or c51)");
}

std::string to_string(RlModelKind kind) {
  return kind == RlModelKind::BellmanDiffusion ? "bellman-diffusion" : "c51";
}

namespace {

class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(static_cast<std::size_t>(capacity)) {}

  void push(RlTransition tr) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(tr));
    } else {
      data_[next_] = std::move(tr);
    }
    next_ = (next_ + 1) % capacity_;
  }

  std::size_t size() const { return data_.size(); }

  std::vector<RlTransition> sample(int n, RngStream& rng) const {
    std::vector<RlTransition> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(data_[rng.uniform_index(data_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<RlTransition> data_;
};

struct EvalStats {
  double mean = 0.0;
  double stddev = 0.0;
};

template <typename GreedyFn>
EvalStats evaluate_greedy(const Env& proto, const GreedyFn& greedy, int episodes,
                          std::int64_t episode_cap, std::uint64_t seed) {
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    RngStream rng(seed, 0x0E5A + static_cast<std::uint64_t>(e));
    auto env = proto.clone();
    RlObservation obs = env->reset(rng);
    double ret = 0.0;
    bool done = false;
    std::int64_t t = 0;
    while (!done && t < episode_cap) {
      const int a = greedy(obs);
      auto [next, reward, is_done] = env->step(a, rng);
      ret += reward;
      obs = next;
      done = is_done;
      ++t;
    }
    returns.push_back(ret);
  }
  EvalStats stats;
  for (double r : returns) stats.mean += r;
  stats.mean /= static_cast<double>(returns.size());
  for (double r : returns) stats.stddev += (r - stats.mean) * (r - stats.mean);
  stats.stddev = std::sqrt(stats.stddev / static_cast<double>(returns.size()));
  return stats;
}

}  // namespace

RlTrainResult rl_train(const Env& env_proto, const RlTrainConfig& cfg, std::uint64_t seed) {
  RngStream env_rng(seed, 1);
  RngStream policy_rng(seed, 2);
  RngStream update_rng(seed, 3);
  RngStream init_rng(seed, 4);

  auto env = env_proto.clone();
  const double scale = env->return_scale();
  const int n_actions = env->num_actions();

  // models (one kind active per run)
  std::unique_ptr<ReturnModel> bd, bd_target;
  std::unique_ptr<C51Model> c51, c51_target;
  if (cfg.kind == RlModelKind::BellmanDiffusion) {
    ReturnModelConfig mc = cfg.bd;
    mc.condition_on_action = true;
    mc.gamma = cfg.gamma;
    if (env->num_states() > 0) {
      bd = std::make_unique<ReturnModel>(env->num_states(), n_actions, mc, init_rng);
    } else {
      bd = std::make_unique<ReturnModel>(env->obs_scale(), n_actions, mc, init_rng);
    }
    bd_target = std::make_unique<ReturnModel>(*bd);
  } else {
    C51Config mc = cfg.c51;
    mc.gamma = cfg.gamma;
    if (env->num_states() > 0) {
      c51 = std::make_unique<C51Model>(env->num_states(), n_actions, mc, init_rng);
    } else {
      c51 = std::make_unique<C51Model>(env->obs_scale(), n_actions, mc, init_rng);
    }
    c51_target = std::make_unique<C51Model>(*c51);
  }

  auto greedy_online = [&](const RlObservation& z) {
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_actions; ++a) {
      const double v = cfg.kind == RlModelKind::BellmanDiffusion
                           ? bd->expected_return(z, a, cfg.expected_return_quad)
                           : c51->expected_value(z, a);
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    return best;
  };

  // Bootstrap action values come from the target copy (or the live model when
  // refreshing is disabled). Tabular environments tabulate them per refresh;
  // the per-batch greedy then costs a lookup instead of a quadrature.
  const int n_states = env->num_states();
  Vec target_value_cache;
  auto refresh_target_cache = [&]() {
    if (n_states <= 0) return;
    target_value_cache.assign(static_cast<std::size_t>(n_states * n_actions), 0.0);
    const ReturnModel* bd_src = cfg.target_refresh > 0 ? bd_target.get() : bd.get();
    const C51Model* c51_src = cfg.target_refresh > 0 ? c51_target.get() : c51.get();
    for (int z = 0; z < n_states; ++z) {
      for (int a = 0; a < n_actions; ++a) {
        const RlObservation obs_z{z, {}};
        target_value_cache[static_cast<std::size_t>(z * n_actions + a)] =
            cfg.kind == RlModelKind::BellmanDiffusion
                ? bd_src->expected_return(obs_z, a, cfg.expected_return_quad)
                : c51_src->expected_value(obs_z, a);
      }
    }
  };
  auto greedy_target = [&](const RlObservation& z) {
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_actions; ++a) {
      double v;
      if (n_states > 0) {
        v = target_value_cache[static_cast<std::size_t>(z.state_index * n_actions + a)];
      } else if (cfg.kind == RlModelKind::BellmanDiffusion) {
        const ReturnModel& src = cfg.target_refresh > 0 ? *bd_target : *bd;
        v = src.expected_return(z, a, cfg.expected_return_quad);
      } else {
        const C51Model& src = cfg.target_refresh > 0 ? *c51_target : *c51;
        v = src.expected_value(z, a);
      }
      if (v > best_v) {
        best_v = v;
        best = a;
      }
    }
    return best;
  };
  refresh_target_cache();

  ReplayBuffer replay(cfg.replay_capacity);
  RlTrainResult result;

  RlObservation obs = env->reset(env_rng);
  std::int64_t episode_steps = 0;
  double loss_a = 0.0, loss_b = 0.0;

  const double anneal_steps = cfg.eps_anneal_steps > 0
                                  ? static_cast<double>(cfg.eps_anneal_steps)
                                  : 0.5 * static_cast<double>(cfg.env_steps);
  for (std::int64_t step = 1; step <= cfg.env_steps; ++step) {
    const double frac = std::min(1.0, static_cast<double>(step) / anneal_steps);
    const double eps = cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start);

    int action;
    if (policy_rng.uniform01() < eps) {
      action = static_cast<int>(policy_rng.uniform_index(static_cast<std::uint64_t>(n_actions)));
    } else {
      action = greedy_online(obs);
    }

    auto [next, reward, done] = env->step(action, env_rng);
    ++episode_steps;
    const bool capped = episode_steps >= cfg.episode_cap;

    RlTransition tr;
    tr.obs = obs;
    tr.action = action;
    tr.reward = reward / scale;
    tr.next_obs = next;
    tr.done = done || capped;
    replay.push(std::move(tr));

    if (done || capped) {
      obs = env->reset(env_rng);
      episode_steps = 0;
    } else {
      obs = next;
    }

    if (static_cast<std::int64_t>(replay.size()) >= cfg.learn_start) {
      auto batch = replay.sample(cfg.batch, update_rng);
      for (RlTransition& b : batch) {
        if (!b.done) b.next_action = greedy_target(b.next_obs);
      }
      if (cfg.kind == RlModelKind::BellmanDiffusion) {
        const ReturnModel& tgt = cfg.target_refresh > 0 ? *bd_target : *bd;
        const auto stats = bd->update(batch, tgt, update_rng);
        loss_a = stats.loss_grad;
        loss_b = stats.loss_id;
      } else {
        const C51Model& tgt = cfg.target_refresh > 0 ? *c51_target : *c51;
        loss_a = c51->update(batch, tgt, update_rng);
        loss_b = 0.0;
      }
    }

    if (cfg.target_refresh > 0 && step % cfg.target_refresh == 0) {
      if (bd) bd_target->set_weights(bd->weights());
      if (c51) c51_target->set_weights(c51->weights());
      refresh_target_cache();
    } else if (cfg.target_refresh == 0 && n_states > 0) {
      refresh_target_cache();  // live bootstrap: keep the table current
    }

    if (step % cfg.eval_every == 0 || step == cfg.env_steps) {
      const EvalStats stats =
          evaluate_greedy(env_proto, greedy_online, cfg.eval_episodes, cfg.episode_cap,
                          seed + static_cast<std::uint64_t>(step));
      CurvePoint point;
      point.env_step = step;
      point.eval_return_mean = stats.mean;
      point.eval_return_std = stats.stddev;
      point.loss_grad = loss_a;
      point.loss_id = loss_b;
      point.eps_exploration = eps;
      result.curve.push_back(point);
    }
  }
  return result;
}

ReturnModel bd_evaluate_policy(const Env& env_proto, const Policy& policy,
                               const PolicyEvalConfig& cfg, std::uint64_t seed) {
  RngStream env_rng(seed, 11);
  RngStream update_rng(seed, 12);
  RngStream init_rng(seed, 13);

  auto env = env_proto.clone();
  ReturnModelConfig mc = cfg.bd;
  mc.condition_on_action = false;

  std::unique_ptr<ReturnModel> model;
  if (env->num_states() > 0) {
    model = std::make_unique<ReturnModel>(env->num_states(), env->num_actions(), mc, init_rng);
  } else {
    model = std::make_unique<ReturnModel>(env->obs_scale(), env->num_actions(), mc, init_rng);
  }
  ReturnModel target(*model);

  const double scale = env->return_scale();
  ReplayBuffer replay(10000);
  RlObservation obs = env->reset(env_rng);
  std::int64_t episode_steps = 0;

  for (std::int64_t step = 1; step <= cfg.updates; ++step) {
    const int action = policy(obs, env_rng);
    auto [next, reward, done] = env->step(action, env_rng);
    ++episode_steps;
    const bool capped = episode_steps >= cfg.episode_cap;

    RlTransition tr;
    tr.obs = obs;
    tr.action = action;
    tr.reward = reward / scale;
    tr.next_obs = next;
    tr.next_action = -1;
    tr.done = done || capped;
    replay.push(std::move(tr));

    if (done || capped) {
      obs = env->reset(env_rng);
      episode_steps = 0;
    } else {
      obs = next;
    }

    if (static_cast<std::int64_t>(replay.size()) >= std::min<std::int64_t>(cfg.updates / 10, 500)) {
      const auto batch = replay.sample(cfg.batch, update_rng);
      const ReturnModel& tgt = cfg.target_refresh > 0 ? target : *model;
      model->update(batch, tgt, update_rng);
      if (cfg.target_refresh > 0 && step % cfg.target_refresh == 0) {
        target.set_weights(model->weights());
      }
    }
  }
  return std::move(*model);
}

double return_distribution_w1(const ReturnModel& model, const RlObservation& z, int action,
                              const SampleSet& returns, int grid_nodes) {
  returns.require_nonempty();
  if (returns.dim() != 1) throw std::invalid_argument("return_distribution_w1: 1-D returns only");
  const double lo = model.config().x_min;
  const double hi = model.config().x_max;
  const double h = (hi - lo) / static_cast<double>(grid_nodes - 1);

  // model density on the grid, normalized
  Vec density(static_cast<std::size_t>(grid_nodes));
  double mass = 0.0;
  for (int i = 0; i < grid_nodes; ++i) {
    const double x = lo + h * static_cast<double>(i);
    density[static_cast<std::size_t>(i)] = model.s_value(x, z, action);
    mass += density[static_cast<std::size_t>(i)] * ((i == 0 || i == grid_nodes - 1) ? 0.5 : 1.0);
  }
  mass *= h;
  if (mass < 1e-12) throw std::runtime_error("return_distribution_w1: degenerate model");

  std::vector<double> sorted;
  sorted.reserve(returns.size());
  for (const Vec& p : returns.points) sorted.push_back(p[0]);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  // W1 = integral |F_model - F_empirical| over the range (cell midpoints)
  double w1 = 0.0;
  double model_cdf = 0.0;
  std::size_t emp_idx = 0;
  for (int i = 0; i + 1 < grid_nodes; ++i) {
    const double x_right = lo + h * static_cast<double>(i + 1);
    model_cdf += 0.5 * (density[static_cast<std::size_t>(i)] + density[static_cast<std::size_t>(i + 1)]) * h / mass;
    while (emp_idx < sorted.size() && sorted[emp_idx] <= x_right) ++emp_idx;
    const double emp_cdf = static_cast<double>(emp_idx) / n;
    w1 += std::abs(std::min(model_cdf, 1.0) - emp_cdf) * h;
  }
  return w1;
}

}  // namespace fieldgen::mdp
