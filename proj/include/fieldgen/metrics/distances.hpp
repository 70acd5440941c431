#pragma once

#include <cstdint>

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::metrics {

using numkit::RngStream;
using numkit::SampleSet;
using numkit::Vec;

/// Order-1 Wasserstein distance between 1-D empirical measures: sorted
/// samples matched index-by-index. When the sizes differ the larger set is
/// subsampled (seeded) to match.
double wasserstein_1d(const SampleSet& a, const SampleSet& b, std::uint64_t subsample_seed = 0);

/// Average of wasserstein_1d over random unit-sphere projections. For D = 1
/// this equals wasserstein_1d exactly (a projection is a sign flip).
double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int n_projections,
                          RngStream& rng);

/// Biased V-statistic MMD^2 with Gaussian kernel exp(-|x-y|^2 / (2 sigma^2)).
double mmd2(const SampleSet& a, const SampleSet& b, double sigma);

/// Median pairwise distance of the pooled set (the usual bandwidth
/// heuristic). Pools are subsampled to cap the O(n^2) scan.
double median_heuristic_bandwidth(const SampleSet& a, const SampleSet& b,
                                  std::size_t max_points = 2048, std::uint64_t seed = 0);

/// Fraction of samples assigned to each center by nearest-center rule.
/// Always sums to 1.
Vec mode_mass(const SampleSet& samples, const std::vector<Vec>& centers);

}  // namespace fieldgen::metrics
