#pragma once

#include <cstdint>

#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::numkit {

/// Counter-based 64-bit generator (SplitMix64 core) with substream selection.
///
/// Identical (seed, stream_id) pairs reproduce the exact output sequence;
/// distinct stream ids select statistically independent substreams, so
/// per-chain / per-worker generators stay reproducible no matter how work is
/// scheduled. A stream is cheap to construct: grabbing a fresh substream is
/// the intended way to fan out.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform01();

  double uniform(double lo, double hi);

  /// Integer uniform on [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  void fill_normal(Vec& out);

  /// Substream derived from this stream's seed. substream(k) == RngStream(seed, k).
  RngStream substream(std::uint64_t stream_id) const { return RngStream(seed_, stream_id); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  std::uint64_t gamma_;  // odd counter increment, derived from stream_id
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fieldgen::numkit
