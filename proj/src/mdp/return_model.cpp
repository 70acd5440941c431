#include "fieldgen/mdp/return_model.hpp"

#include <cmath>
#include <stdexcept>

#include "fieldgen/fieldnet/objective.hpp"
#include "fieldgen/numkit/gaussian.hpp"

namespace fieldgen::mdp {

using fieldnet::Objective;

double quadrature_mean(const std::function<double(double)>& f, double lo, double hi, int nodes) {
  if (nodes < 3) throw std::invalid_argument("quadrature_mean: too few nodes");
  if (!(lo < hi)) throw std::invalid_argument("quadrature_mean: lo < hi required");
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  double mass = 0.0, first_moment = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    const double v = f(x);
    mass += w * v;
    first_moment += w * x * v;
  }
  mass *= h;
  first_moment *= h;
  if (mass < 1e-12) throw std::runtime_error("quadrature_mean: degenerate mass (below 1e-12)");
  return first_moment / mass;
}

void ReturnModelConfig::validate() const {
  if (!(x_min < x_max)) throw std::invalid_argument("ReturnModelConfig: x_min < x_max required");
  if (!(xi > 0.0)) throw std::invalid_argument("ReturnModelConfig: xi must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("ReturnModelConfig: epsilon must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("ReturnModelConfig: gamma must be in (0, 1]");
  }
  if (embed_dim < 1) throw std::invalid_argument("ReturnModelConfig: embed_dim must be >= 1");
  adam.validate();
}

ReturnModel::ReturnModel(int num_states, int num_actions, const ReturnModelConfig& cfg,
                         numkit::RngStream& rng)
    : cfg_(cfg), discrete_(true), num_actions_(num_actions) {
  cfg_.validate();
  if (num_states < 1) throw std::invalid_argument("ReturnModel: num_states must be >= 1");
  g_embed_ = fieldnet::Embedding::make(num_states, cfg_.embed_dim, rng);
  s_embed_ = fieldnet::Embedding::make(num_states, cfg_.embed_dim, rng);
  build_networks(cfg_.embed_dim + (cfg_.condition_on_action ? num_actions_ : 0), rng);
}

ReturnModel::ReturnModel(const Vec& obs_scale, int num_actions, const ReturnModelConfig& cfg,
                         numkit::RngStream& rng)
    : cfg_(cfg), discrete_(false), num_actions_(num_actions), obs_scale_(obs_scale) {
  cfg_.validate();
  if (obs_scale_.empty()) throw std::invalid_argument("ReturnModel: empty observation scale");
  build_networks(static_cast<int>(obs_scale_.size()) +
                     (cfg_.condition_on_action ? num_actions_ : 0),
                 rng);
}

void ReturnModel::build_networks(int cond_dim, numkit::RngStream& rng) {
  g_spec_.input_dim = 1;
  g_spec_.hidden_sizes = cfg_.hidden;
  g_spec_.output_dim = 1;
  g_spec_.activation = cfg_.activation;
  g_spec_.output_head = fieldnet::OutputHead::Linear;
  g_spec_.condition_dim = cond_dim;

  s_spec_ = g_spec_;
  s_spec_.output_head = fieldnet::OutputHead::Softplus;

  g_params_ = fieldnet::init_params(g_spec_, rng);
  s_params_ = fieldnet::init_params(s_spec_, rng);
  s_params_.back() = cfg_.s_bias_init;  // last parameter is the head bias

  g_adam_ = AdamState::make(g_params_.size(), cfg_.adam);
  s_adam_ = AdamState::make(s_params_.size(), cfg_.adam);
  if (discrete_) {
    g_embed_adam_ = AdamState::make(g_embed_.table.size(), cfg_.adam);
    s_embed_adam_ = AdamState::make(s_embed_.table.size(), cfg_.adam);
  }
}

Vec ReturnModel::condition_impl(const RlObservation& z, int action,
                                const fieldnet::Embedding& embed) const {
  Vec cond;
  if (discrete_) {
    if (z.state_index < 0) throw std::invalid_argument("ReturnModel: missing state index");
    cond = embed.row(z.state_index);
  } else {
    if (z.features.size() != obs_scale_.size()) {
      throw std::invalid_argument("ReturnModel: observation feature size mismatch");
    }
    cond.resize(z.features.size());
    for (std::size_t i = 0; i < cond.size(); ++i) cond[i] = z.features[i] / obs_scale_[i];
  }
  if (cfg_.condition_on_action) {
    if (action < 0 || action >= num_actions_) {
      throw std::invalid_argument("ReturnModel: conditioning action out of range");
    }
    Vec onehot(static_cast<std::size_t>(num_actions_), 0.0);
    onehot[static_cast<std::size_t>(action)] = 1.0;
    cond.insert(cond.end(), onehot.begin(), onehot.end());
  }
  return cond;
}

// Return coordinate normalized to [-1, 1] before entering the nets; the
// terminal-loss derivative picks up the d(normalized)/dx factor.
double ReturnModel::normalize_x(double x) const {
  return (2.0 * x - (cfg_.x_min + cfg_.x_max)) / (cfg_.x_max - cfg_.x_min);
}

double ReturnModel::x_input_scale() const { return 2.0 / (cfg_.x_max - cfg_.x_min); }

Vec ReturnModel::g_condition(const RlObservation& z, int action) const {
  return condition_impl(z, action, g_embed_);
}

Vec ReturnModel::s_condition(const RlObservation& z, int action) const {
  return condition_impl(z, action, s_embed_);
}

double ReturnModel::s_value(double x, const RlObservation& z, int action) const {
  const Vec cond = s_condition(z, action);
  return fieldnet::forward_scalar(s_spec_, s_params_, {normalize_x(x)}, &cond);
}

double ReturnModel::g_value(double x, const RlObservation& z, int action) const {
  const Vec cond = g_condition(z, action);
  return fieldnet::forward(g_spec_, g_params_, {normalize_x(x)}, &cond)[0];
}

double ReturnModel::expected_return(const RlObservation& z, int action, int quad_nodes) const {
  const Vec cond = s_condition(z, action);
  // Integrate past the range edges so boundary atoms smeared by xi/epsilon
  // keep their full mass (a half-truncated bump at x_min biases the mean up).
  const double margin = 3.0 * std::sqrt(cfg_.xi * cfg_.xi + cfg_.epsilon);
  return quadrature_mean(
      [&](double x) {
        return fieldnet::forward_scalar(s_spec_, s_params_, {normalize_x(x)}, &cond);
      },
      cfg_.x_min - margin, cfg_.x_max + margin, quad_nodes);
}

ReturnModel::BootstrapTargets ReturnModel::bootstrap_targets(const ReturnModel& target, double x,
                                                             double reward,
                                                             const RlObservation& next_obs,
                                                             int next_action) const {
  BootstrapTargets out;
  out.query = (x - reward) / cfg_.gamma;
  out.out_of_range = out.query < cfg_.x_min || out.query > cfg_.x_max;
  out.g_tgt = target.g_value(out.query, next_obs, next_action);
  if (cfg_.chain_rule_gamma) out.g_tgt /= cfg_.gamma * cfg_.gamma;
  out.s_tgt = target.s_value(out.query, next_obs, next_action) / cfg_.gamma;
  return out;
}

ReturnModel::Weights ReturnModel::weights() const {
  return {g_params_, s_params_, g_embed_.table, s_embed_.table};
}

void ReturnModel::set_weights(const Weights& w) {
  if (w.g_params.size() != g_params_.size() || w.s_params.size() != s_params_.size() ||
      w.g_embed.size() != g_embed_.table.size() || w.s_embed.size() != s_embed_.table.size()) {
    throw std::invalid_argument("ReturnModel: weight shapes do not match");
  }
  g_params_ = w.g_params;
  s_params_ = w.s_params;
  g_embed_.table = w.g_embed;
  s_embed_.table = w.s_embed;
}

void ReturnModel::set_learning_rate(double lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("set_learning_rate: lr must be >= 0");
  g_adam_.cfg.learning_rate = lr;
  s_adam_.cfg.learning_rate = lr;
  g_embed_adam_.cfg.learning_rate = lr;
  s_embed_adam_.cfg.learning_rate = lr;
}

ReturnModel::UpdateStats ReturnModel::update(const std::vector<RlTransition>& batch,
                                             const ReturnModel& target, numkit::RngStream& rng) {
  if (batch.empty()) throw std::invalid_argument("ReturnModel::update: empty batch");
  UpdateStats stats;

  Objective g_obj(g_spec_, g_params_);
  Objective s_obj(s_spec_, s_params_);
  Objective::NodeId g_root = g_obj.constant(0.0);
  Objective::NodeId s_root = s_obj.constant(0.0);

  // cond slot -> embedding row, per network
  std::vector<std::pair<int, int>> g_slots, s_slots;  // (slot, state)
  auto g_slot_for = [&](const RlObservation& z, int action) {
    const int slot = g_obj.add_cond(g_condition(z, action));
    if (discrete_) g_slots.emplace_back(slot, z.state_index);
    return slot;
  };
  auto s_slot_for = [&](const RlObservation& z, int action) {
    const int slot = s_obj.add_cond(s_condition(z, action));
    if (discrete_) s_slots.emplace_back(slot, z.state_index);
    return slot;
  };
  const Vec unit{1.0};

  for (const RlTransition& tr : batch) {
    const int g_slot = g_slot_for(tr.obs, tr.action);
    const int s_slot = s_slot_for(tr.obs, tr.action);
    if (tr.done) {
      // episode-ending transition: the return from here is exactly the reward
      const double x1 = tr.reward + cfg_.xi * rng.normal();
      const double x2 = tr.reward + cfg_.xi * rng.normal();
      const double delta = numkit::gaussian_pdf_1d(x1, x2, cfg_.epsilon);
      const Vec vx1{normalize_x(x1)};
      const Vec dx{x_input_scale()};  // d(normalized)/dx for the raw-x derivative
      g_root = g_obj.add(g_root, g_obj.add(g_obj.square(g_obj.model_dot(vx1, unit, g_slot)),
                                           g_obj.scale(g_obj.model_jvp_dot(vx1, dx, unit, g_slot),
                                                       delta)));
      const auto sv = s_obj.model_scalar(vx1, s_slot);
      s_root = s_obj.add(s_root, s_obj.sub(s_obj.square(sv), s_obj.scale(sv, 2.0 * delta)));
    } else {
      const double x = rng.uniform(cfg_.x_min, cfg_.x_max);
      const BootstrapTargets bt = bootstrap_targets(target, x, tr.reward, tr.next_obs,
                                                    tr.next_action);
      if (bt.out_of_range) stats.range_warnings += 1;
      const Vec vx{normalize_x(x)};
      g_root = g_obj.add(g_root, g_obj.square(g_obj.sub(g_obj.model_dot(vx, unit, g_slot),
                                                        g_obj.constant(bt.g_tgt))));
      s_root = s_obj.add(s_root, s_obj.square(s_obj.sub(s_obj.model_scalar(vx, s_slot),
                                                        s_obj.constant(bt.s_tgt))));
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  g_root = g_obj.scale(g_root, inv);
  s_root = s_obj.scale(s_root, inv);
  stats.loss_grad = g_obj.value(g_root);
  stats.loss_id = s_obj.value(s_root);

  const Vec g_grad = g_obj.grad(g_root);
  const Vec s_grad = s_obj.grad(s_root);
  fieldnet::adam_step(g_params_, g_grad, g_adam_);
  fieldnet::adam_step(s_params_, s_grad, s_adam_);

  if (discrete_) {
    Vec g_embed_grad(g_embed_.table.size(), 0.0);
    for (const auto& [slot, state] : g_slots) {
      const Vec& cg = g_obj.cond_grad(slot);
      const std::size_t off =
          static_cast<std::size_t>(state) * static_cast<std::size_t>(g_embed_.dim);
      for (int c = 0; c < g_embed_.dim; ++c) {
        g_embed_grad[off + static_cast<std::size_t>(c)] += cg[static_cast<std::size_t>(c)];
      }
    }
    Vec s_embed_grad(s_embed_.table.size(), 0.0);
    for (const auto& [slot, state] : s_slots) {
      const Vec& cg = s_obj.cond_grad(slot);
      const std::size_t off =
          static_cast<std::size_t>(state) * static_cast<std::size_t>(s_embed_.dim);
      for (int c = 0; c < s_embed_.dim; ++c) {
        s_embed_grad[off + static_cast<std::size_t>(c)] += cg[static_cast<std::size_t>(c)];
      }
    }
    fieldnet::adam_step(g_embed_.table, g_embed_grad, g_embed_adam_);
    fieldnet::adam_step(s_embed_.table, s_embed_grad, s_embed_adam_);
  }
  return stats;
}

}  // namespace fieldgen::mdp
