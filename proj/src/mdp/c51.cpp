#include "fieldgen/mdp/c51.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::mdp {

void C51Config::validate() const {
  if (atoms < 2) throw std::invalid_argument("C51Config: needs at least 2 atoms");
  if (!(x_min < x_max)) throw std::invalid_argument("C51Config: x_min < x_max required");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("C51Config: bad gamma");
  adam.validate();
}

void c51_project_atom(const Vec& support, double value, double mass, Vec& probs_out) {
  const int k = static_cast<int>(support.size());
  const double x_min = support.front();
  const double x_max = support.back();
  const double dz = (x_max - x_min) / static_cast<double>(k - 1);
  const double clamped = std::min(std::max(value, x_min), x_max);
  const double b = (clamped - x_min) / dz;
  const int lo = static_cast<int>(std::floor(b));
  const int hi = static_cast<int>(std::ceil(b));
  if (lo == hi) {
    probs_out[static_cast<std::size_t>(lo)] += mass;
  } else {
    probs_out[static_cast<std::size_t>(lo)] += mass * (static_cast<double>(hi) - b);
    probs_out[static_cast<std::size_t>(hi)] += mass * (b - static_cast<double>(lo));
  }
}

Vec c51_project(const Vec& support, const Vec& next_probs, double reward, double gamma,
                double x_min, double x_max) {
  (void)x_min;
  (void)x_max;
  if (support.size() != next_probs.size()) {
    throw std::invalid_argument("c51_project: support/probs size mismatch");
  }
  Vec out(support.size(), 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    c51_project_atom(support, reward + gamma * support[j], next_probs[j], out);
  }
  return out;
}

namespace {

Vec make_support(const C51Config& cfg) {
  Vec s(static_cast<std::size_t>(cfg.atoms));
  const double dz = (cfg.x_max - cfg.x_min) / static_cast<double>(cfg.atoms - 1);
  for (int i = 0; i < cfg.atoms; ++i) s[static_cast<std::size_t>(i)] = cfg.x_min + dz * i;
  return s;
}

Vec softmax(const double* logits, int n) {
  double max_logit = logits[0];
  for (int i = 1; i < n; ++i) max_logit = std::max(max_logit, logits[i]);
  Vec p(static_cast<std::size_t>(n));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = std::exp(logits[i] - max_logit);
    z += p[static_cast<std::size_t>(i)];
  }
  for (double& x : p) x /= z;
  return p;
}

}  // namespace

C51Model::C51Model(int num_states, int num_actions, const C51Config& cfg, numkit::RngStream& rng)
    : cfg_(cfg), discrete_(true), num_states_(num_states), num_actions_(num_actions) {
  cfg_.validate();
  if (num_states < 1) throw std::invalid_argument("C51Model: num_states must be >= 1");
  support_ = make_support(cfg_);
  params_.assign(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions) *
                     static_cast<std::size_t>(cfg_.atoms),
                 0.0);
  for (double& x : params_) x = 0.01 * rng.normal();
  adam_ = fieldnet::AdamState::make(params_.size(), cfg_.adam);
}

C51Model::C51Model(const Vec& obs_scale, int num_actions, const C51Config& cfg,
                   numkit::RngStream& rng)
    : cfg_(cfg), discrete_(false), num_actions_(num_actions), obs_scale_(obs_scale) {
  cfg_.validate();
  if (obs_scale_.empty()) throw std::invalid_argument("C51Model: empty observation scale");
  support_ = make_support(cfg_);
  spec_.input_dim = static_cast<int>(obs_scale_.size());
  spec_.hidden_sizes = cfg_.hidden;
  spec_.output_dim = num_actions * cfg_.atoms;
  spec_.activation = fieldnet::Activation::Tanh;
  spec_.output_head = fieldnet::OutputHead::Linear;
  params_ = fieldnet::init_params(spec_, rng);
  adam_ = fieldnet::AdamState::make(params_.size(), cfg_.adam);
}

void C51Model::set_weights(const Weights& w) {
  if (w.params.size() != params_.size()) {
    throw std::invalid_argument("C51Model: weight shapes do not match");
  }
  params_ = w.params;
}

Vec C51Model::features(const RlObservation& z) const {
  if (z.features.size() != obs_scale_.size()) {
    throw std::invalid_argument("C51Model: observation feature size mismatch");
  }
  Vec f(z.features.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = z.features[i] / obs_scale_[i];
  return f;
}

Vec C51Model::logits(const RlObservation& z) const {
  if (discrete_) {
    if (z.state_index < 0 || z.state_index >= num_states_) {
      throw std::invalid_argument("C51Model: state index out of range");
    }
    const std::size_t off = static_cast<std::size_t>(z.state_index) *
                            static_cast<std::size_t>(num_actions_ * cfg_.atoms);
    return Vec(params_.begin() + static_cast<long>(off),
               params_.begin() + static_cast<long>(off) + num_actions_ * cfg_.atoms);
  }
  const Vec f = features(z);
  return fieldnet::forward(spec_, params_, f);
}

Vec C51Model::probs(const RlObservation& z, int action) const {
  if (action < 0 || action >= num_actions_) {
    throw std::invalid_argument("C51Model: action out of range");
  }
  const Vec all = logits(z);
  return softmax(all.data() + static_cast<std::size_t>(action) * static_cast<std::size_t>(cfg_.atoms),
                 cfg_.atoms);
}

double C51Model::expected_value(const RlObservation& z, int action) const {
  const Vec p = probs(z, action);
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) v += p[i] * support_[i];
  return v;
}

double C51Model::update(const std::vector<RlTransition>& batch, const C51Model& target,
                        numkit::RngStream&) {
  if (batch.empty()) throw std::invalid_argument("C51Model::update: empty batch");
  double ce_loss = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());

  Vec grad(params_.size(), 0.0);
  for (const RlTransition& tr : batch) {
    Vec m;
    if (tr.done) {
      m.assign(static_cast<std::size_t>(cfg_.atoms), 0.0);
      c51_project_atom(support_, tr.reward, 1.0, m);
    } else {
      const Vec next_p = target.probs(tr.next_obs, tr.next_action);
      m = c51_project(support_, next_p, tr.reward, cfg_.gamma, cfg_.x_min, cfg_.x_max);
    }

    const Vec all = logits(tr.obs);
    const std::size_t block =
        static_cast<std::size_t>(tr.action) * static_cast<std::size_t>(cfg_.atoms);
    const Vec p = softmax(all.data() + block, cfg_.atoms);
    for (int i = 0; i < cfg_.atoms; ++i) {
      const double mi = m[static_cast<std::size_t>(i)];
      if (mi > 0.0) ce_loss -= inv * mi * std::log(std::max(p[static_cast<std::size_t>(i)], 1e-300));
    }

    // d(cross-entropy)/d(logit) = p - m on the chosen action's block
    if (discrete_) {
      const std::size_t off = static_cast<std::size_t>(tr.obs.state_index) *
                                  static_cast<std::size_t>(num_actions_ * cfg_.atoms) +
                              block;
      for (int i = 0; i < cfg_.atoms; ++i) {
        grad[off + static_cast<std::size_t>(i)] +=
            inv * (p[static_cast<std::size_t>(i)] - m[static_cast<std::size_t>(i)]);
      }
    } else {
      fieldnet::EvalTrace trace;
      const Vec f = features(tr.obs);
      fieldnet::forward(spec_, params_, f, nullptr, &trace);
      Vec out_adj(static_cast<std::size_t>(spec_.output_dim), 0.0);
      for (int i = 0; i < cfg_.atoms; ++i) {
        out_adj[block + static_cast<std::size_t>(i)] =
            inv * (p[static_cast<std::size_t>(i)] - m[static_cast<std::size_t>(i)]);
      }
      fieldnet::backward(spec_, params_, trace, out_adj, grad);
    }
  }
  fieldnet::adam_step(params_, grad, adam_);
  return ce_loss;
}

}  // namespace fieldgen::mdp
