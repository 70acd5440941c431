#pragma once

#include <cstdint>

#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::fieldnet {

using numkit::Vec;

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  void validate() const;
};

/// First/second moment accumulators plus step counter for one parameter
/// vector. There is no weight decay.
struct AdamState {
  AdamConfig cfg;
  Vec m;
  Vec v;
  std::int64_t step = 0;

  static AdamState make(std::size_t param_count, const AdamConfig& cfg = {});
};

/// One bias-corrected Adam update, in place. Deterministic given
/// (params, grad, state).
void adam_step(Vec& params, const Vec& grad, AdamState& state);

}  // namespace fieldgen::fieldnet
