#pragma once

#include <utility>

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::datasets {

using numkit::RngStream;
using numkit::SampleSet;
using numkit::Vec;

/// Isotropic Gaussian mixture with closed-form density and density gradient.
struct MogSpec {
  Vec weights;
  std::vector<Vec> means;
  double var = 0.25;

  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  void validate() const;

  /// The unbalanced three-mode benchmark: weights (0.45, 0.45, 0.1) at
  /// (-2,-2), (2,2), (2,-2), var 0.25.
  static MogSpec unbalanced_three_mode_2d();
  static MogSpec gaussian_1d(double mean = 0.0, double var = 1.0);
  static MogSpec bimodal_1d(double separation = 2.0, double var = 1.0);
};

SampleSet gen_mog(const MogSpec& spec, int n, RngStream& rng);

/// Exact mixture density and its spatial gradient at x.
std::pair<double, Vec> mog_fields(const MogSpec& spec, const Vec& x);

/// Uniform over pairwise-disjoint intervals, mass proportional to length.
struct SpanSpec {
  std::vector<std::pair<double, double>> spans;

  void validate() const;
  double total_length() const;
  static SpanSpec default_three_span();  // (-1,0), (0.5,1), (1.5,2)
};

SampleSet gen_disjoint_uniform(const SpanSpec& spec, int n, RngStream& rng);

/// Two interleaving half circles: the upper unit half circle centered at the
/// origin and a lower half circle centered at (1, 0.5), plus isotropic
/// Gaussian noise of the given standard deviation.
SampleSet gen_two_moons(int n, double noise, RngStream& rng);

}  // namespace fieldgen::datasets
