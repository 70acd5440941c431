#pragma once

#include <cstdint>
#include <functional>

#include "fieldgen/fieldnet/adam.hpp"
#include "fieldgen/fieldnet/field_pair.hpp"
#include "fieldgen/numkit/gaussian.hpp"
#include "fieldgen/numkit/sample_set.hpp"
#include "fieldgen/numkit/slice.hpp"

namespace fieldgen::matcher {

using fieldnet::AdamConfig;
using fieldnet::AdamState;
using fieldnet::FieldModelPair;
using numkit::KernelConfig;
using numkit::RngStream;
using numkit::SampleSet;
using numkit::SliceDist;
using numkit::Vec;

struct LossReport {
  double loss_grad = 0.0;
  double loss_id = 0.0;
  std::int64_t step = 0;
  double epsilon = 0.0;
  int slice_count = 1;
};

struct TrainConfig {
  KernelConfig kernel{0.5};
  int slice_count = 1;
  SliceDist q_v = SliceDist::Rademacher;
  SliceDist q_w = SliceDist::Rademacher;
  int batch_pairs = 64;
  AdamConfig adam{};
  std::int64_t steps = 20000;
  int log_every = 200;

  /// Replace the exact v.J(x)v path with the symmetric difference
  /// v.(g(x+hv) - g(x-hv))/(2h), which only needs first-order reverse mode.
  bool fd_jvp = false;
  double fd_h = 1e-3;

  void validate() const;
};

/// Draws minibatches of (x1, x2) pairs: 2B points are drawn i.i.d. from the
/// dataset per call and consumed as B pairs.
class PairBatchSource {
 public:
  explicit PairBatchSource(const SampleSet& data);
  std::vector<std::pair<const Vec*, const Vec*>> next(int pairs, RngStream& rng);
  const SampleSet& data() const { return *data_; }

 private:
  const SampleSet* data_;
};

/// One optimizer step on both field networks: averages the single-sample
/// sliced losses over the batch and slice draws, then applies Adam to each
/// parameter set.
LossReport train_step(FieldModelPair& pair, PairBatchSource& source, const TrainConfig& cfg,
                      AdamState& g_state, AdamState& s_state, RngStream& rng);

struct TrainResult {
  std::vector<LossReport> log;
};

/// Full training run; on_log fires every cfg.log_every steps (and on the
/// final step).
TrainResult train_fields(FieldModelPair& pair, const SampleSet& data, const TrainConfig& cfg,
                         std::uint64_t seed,
                         const std::function<void(const LossReport&)>& on_log = nullptr);

}  // namespace fieldgen::matcher
