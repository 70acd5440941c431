#pragma once

#include "fieldgen/matcher/grid.hpp"
#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::matcher {

/// Closed-form minimizer of the relaxed matching objectives, tabulated on a
/// grid: the kernel-smoothed empirical density
///   s*(x) = mean_i N(x - x_i; 0, eps I)
/// together with its analytic gradient per axis. This is the sampling-free
/// reference the trained models are compared against.
struct OracleFit {
  GridDensity density;
  std::vector<Vec> gradient;  // gradient[axis][node], same layout as density.values
};

/// 1-D or 2-D samples only. Throws std::domain_error if any sample falls
/// outside the grid domain.
OracleFit grid_oracle_fit(const numkit::SampleSet& samples, double epsilon,
                          std::vector<GridAxis> axes);

}  // namespace fieldgen::matcher
