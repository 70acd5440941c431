#include "fieldgen/matcher/train.hpp"

#include <stdexcept>

#include "fieldgen/fieldnet/objective.hpp"

namespace fieldgen::matcher {

using fieldnet::Objective;

void TrainConfig::validate() const {
  kernel.validate();
  adam.validate();
  if (slice_count < 1) throw std::invalid_argument("TrainConfig: slice_count must be >= 1");
  if (batch_pairs < 1) throw std::invalid_argument("TrainConfig: batch_pairs must be >= 1");
  if (steps < 0) throw std::invalid_argument("TrainConfig: steps must be >= 0");
  if (fd_jvp && !(fd_h > 0.0)) throw std::invalid_argument("TrainConfig: fd_h must be > 0");
}

PairBatchSource::PairBatchSource(const SampleSet& data) : data_(&data) {
  data.require_uniform_dim();
}

std::vector<std::pair<const Vec*, const Vec*>> PairBatchSource::next(int pairs, RngStream& rng) {
  if (data_->points.empty()) {
    throw std::runtime_error("data exhausted: batch source has no samples");
  }
  std::vector<std::pair<const Vec*, const Vec*>> out;
  out.reserve(static_cast<std::size_t>(pairs));
  const std::uint64_t n = data_->points.size();
  for (int b = 0; b < pairs; ++b) {
    const Vec* x1 = &data_->points[rng.uniform_index(n)];
    const Vec* x2 = &data_->points[rng.uniform_index(n)];
    out.emplace_back(x1, x2);
  }
  return out;
}

LossReport train_step(FieldModelPair& pair, PairBatchSource& source, const TrainConfig& cfg,
                      AdamState& g_state, AdamState& s_state, RngStream& rng) {
  cfg.validate();
  const int d = pair.dim();
  const auto batch = source.next(cfg.batch_pairs, rng);
  const double inv_count = 1.0 / static_cast<double>(batch.size() * cfg.slice_count);

  Objective g_obj(pair.g_spec, pair.g_params);
  Objective s_obj(pair.s_spec, pair.s_params);
  Objective::NodeId g_root = g_obj.constant(0.0);
  Objective::NodeId s_root = s_obj.constant(0.0);

  for (const auto& [x1, x2] : batch) {
    for (int k = 0; k < cfg.slice_count; ++k) {
      const Vec v = numkit::sample_slice(cfg.q_v, d, rng);
      const Vec w = numkit::sample_slice(cfg.q_w, d, rng);
      const double delta =
          numkit::gaussian_pdf_1d(numkit::dot(w, *x2), numkit::dot(w, *x1), cfg.kernel.epsilon);

      Objective::NodeId vjv;
      if (cfg.fd_jvp) {
        Vec xp = *x1, xm = *x1;
        numkit::add_scaled(xp, cfg.fd_h, v);
        numkit::add_scaled(xm, -cfg.fd_h, v);
        vjv = g_obj.scale(g_obj.sub(g_obj.model_dot(xp, v), g_obj.model_dot(xm, v)),
                          1.0 / (2.0 * cfg.fd_h));
      } else {
        vjv = g_obj.model_jvp_dot(*x1, v, v);
      }
      const auto g_term = g_obj.add(g_obj.square(g_obj.model_dot(*x1, v)), g_obj.scale(vjv, delta));
      g_root = g_obj.add(g_root, g_term);

      const auto s_val = s_obj.model_scalar(*x1);
      const auto s_term = s_obj.sub(s_obj.square(s_val), s_obj.scale(s_val, 2.0 * delta));
      s_root = s_obj.add(s_root, s_term);
    }
  }
  g_root = g_obj.scale(g_root, inv_count);
  s_root = s_obj.scale(s_root, inv_count);

  const Vec g_grad = g_obj.grad(g_root);
  const Vec s_grad = s_obj.grad(s_root);
  fieldnet::adam_step(pair.g_params, g_grad, g_state);
  fieldnet::adam_step(pair.s_params, s_grad, s_state);

  LossReport report;
  report.loss_grad = g_obj.value(g_root);
  report.loss_id = s_obj.value(s_root);
  report.step = g_state.step;
  report.epsilon = cfg.kernel.epsilon;
  report.slice_count = cfg.slice_count;
  return report;
}

TrainResult train_fields(FieldModelPair& pair, const SampleSet& data, const TrainConfig& cfg,
                         std::uint64_t seed,
                         const std::function<void(const LossReport&)>& on_log) {
  cfg.validate();
  PairBatchSource source(data);
  AdamState g_state = AdamState::make(pair.g_params.size(), cfg.adam);
  AdamState s_state = AdamState::make(pair.s_params.size(), cfg.adam);
  RngStream rng(seed, 0);

  TrainResult result;
  for (std::int64_t step = 1; step <= cfg.steps; ++step) {
    const LossReport report = train_step(pair, source, cfg, g_state, s_state, rng);
    if (step % cfg.log_every == 0 || step == cfg.steps) {
      result.log.push_back(report);
      if (on_log) on_log(report);
    }
  }
  return result;
}

}  // namespace fieldgen::matcher
