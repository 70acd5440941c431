#include "fieldgen/dynamics/sde.hpp"

#include <cmath>

namespace fieldgen::dynamics {

InitDist InitDist::uniform_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw std::invalid_argument("InitDist::uniform_box: bounds must be non-empty and aligned");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("InitDist::uniform_box: lo < hi required");
  }
  InitDist d;
  d.kind = InitKind::UniformBox;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

InitDist InitDist::point(Vec x0) {
  if (x0.empty()) throw std::invalid_argument("InitDist::point: empty point");
  InitDist d;
  d.kind = InitKind::Point;
  d.x0 = std::move(x0);
  return d;
}

Vec InitDist::draw(int dim, RngStream& rng) const {
  switch (kind) {
    case InitKind::StandardNormal: {
      Vec x(static_cast<std::size_t>(dim));
      rng.fill_normal(x);
      return x;
    }
    case InitKind::UniformBox: {
      if (static_cast<int>(lo.size()) != dim) {
        throw std::invalid_argument("InitDist: uniform box bounds do not match dimension");
      }
      Vec x(static_cast<std::size_t>(dim));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
      return x;
    }
    case InitKind::Point:
      if (static_cast<int>(x0.size()) != dim) {
        throw std::invalid_argument("InitDist: point does not match dimension");
      }
      return x0;
  }
  throw std::logic_error("InitDist: bad kind");
}

void SdeConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("SdeConfig: steps must be >= 0");
  if (!(eta > 0.0)) throw std::invalid_argument("SdeConfig: step size eta must be > 0");
  if (chains < 1) throw std::invalid_argument("SdeConfig: chains must be >= 1");
}

Vec em_step(const Vec& x, const Vec& drift, double diffusion, double eta, RngStream& rng) {
  if (drift.size() != x.size()) throw std::invalid_argument("em_step: drift dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("em_step: eta must be > 0");
  if (diffusion < 0.0) throw std::invalid_argument("em_step: diffusion must be >= 0");
  const double noise_scale = std::sqrt(diffusion * eta);
  Vec next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    next[i] = x[i] + drift[i] * eta + noise_scale * rng.normal();
  }
  return next;
}

SampleRun sample_fields(const FieldFns& fields, const SdeConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SampleRun run;
  run.finals.seed = seed;
  run.finals.source_label = "sde";
  run.finals.points.reserve(static_cast<std::size_t>(cfg.chains));
  if (cfg.record_trajectories) run.trajectories.reserve(static_cast<std::size_t>(cfg.chains));

  for (int chain = 0; chain < cfg.chains; ++chain) {
    RngStream rng(seed, static_cast<std::uint64_t>(chain));
    Vec x = cfg.init.draw(fields.dim, rng);
    Trajectory traj;
    if (cfg.record_trajectories) {
      traj.chain_id = chain;
      traj.seed = seed;
      traj.points.push_back(x);
    }
    for (std::int64_t t = 0; t < cfg.steps; ++t) {
      const Vec drift = fields.drift(x);
      const double diff_sq = fields.diffusion_sq(x);
      if (!numkit::all_finite(drift) || !std::isfinite(diff_sq)) {
        throw DivergedChainError(chain, t);
      }
      x = em_step(x, drift, std::max(diff_sq, 0.0), cfg.eta, rng);
      if (!numkit::all_finite(x)) throw DivergedChainError(chain, t);
      if (cfg.record_trajectories) traj.points.push_back(x);
    }
    run.finals.points.push_back(std::move(x));
    if (cfg.record_trajectories) run.trajectories.push_back(std::move(traj));
  }
  return run;
}

FieldFns fields_from_pair(const FieldModelPair& pair) {
  FieldFns f;
  f.dim = pair.dim();
  f.drift = [&pair](const Vec& x) { return pair.g(x); };
  f.diffusion_sq = [&pair](const Vec& x) { return pair.s(x); };
  return f;
}

FieldFns fields_from_analytic(const AnalyticTarget& target) {
  FieldFns f;
  f.dim = target.dim;
  f.drift = target.gradient;
  f.diffusion_sq = target.density;
  return f;
}

SampleRun sample_learned(const FieldModelPair& pair, const SdeConfig& cfg, std::uint64_t seed) {
  SampleRun run = sample_fields(fields_from_pair(pair), cfg, seed);
  run.finals.source_label = "sde-learned";
  return run;
}

SampleRun sample_analytic(const AnalyticTarget& target, const SdeConfig& cfg, std::uint64_t seed) {
  SampleRun run = sample_fields(fields_from_analytic(target), cfg, seed);
  run.finals.source_label = "sde-analytic";
  return run;
}

namespace {

SampleRun run_langevin(const FieldFns& fields, const SdeConfig& cfg, double s_min,
                       std::uint64_t seed) {
  if (!(s_min > 0.0)) throw std::invalid_argument("sample_langevin: s_min must be > 0");
  FieldFns langevin;
  langevin.dim = fields.dim;
  langevin.drift = [fields, s_min](const Vec& x) {
    Vec g = fields.drift(x);
    const double s = std::max(fields.diffusion_sq(x), s_min);
    for (double& gi : g) gi /= s;
    return g;
  };
  langevin.diffusion_sq = [](const Vec&) { return 2.0; };
  SampleRun run = sample_fields(langevin, cfg, seed);
  run.finals.source_label = "langevin";
  return run;
}

}  // namespace

SampleRun sample_langevin(const FieldFns& fields, const SdeConfig& cfg, double s_min,
                          std::uint64_t seed) {
  return run_langevin(fields, cfg, s_min, seed);
}

SampleRun sample_langevin(const AnalyticTarget& target, const SdeConfig& cfg, double s_min,
                          std::uint64_t seed) {
  return run_langevin(fields_from_analytic(target), cfg, s_min, seed);
}

}  // namespace fieldgen::dynamics
