#pragma once

#include <vector>

#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::matcher {

using numkit::Vec;

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;  // number of nodes, endpoints included

  double spacing() const { return (hi - lo) / static_cast<double>(count - 1); }
  double node(int i) const { return lo + spacing() * static_cast<double>(i); }
  void validate() const;
};

/// Density tabulated on a uniform 1-D or 2-D node grid. For 2-D the values
/// are stored row-major with axis 0 as the slow index.
struct GridDensity {
  std::vector<GridAxis> axes;
  Vec values;

  static GridDensity zeros(std::vector<GridAxis> axes);

  int ndim() const { return static_cast<int>(axes.size()); }
  std::size_t node_count() const;

  double& at(int i) { return values[static_cast<std::size_t>(i)]; }
  double at(int i) const { return values[static_cast<std::size_t>(i)]; }
  double& at(int i, int j);
  double at(int i, int j) const;

  /// Trapezoid integral over the domain.
  double integral() const;
  /// Scale so the trapezoid integral is 1. Requires a positive integral.
  void normalize();
  /// Per-node trapezoid weight (product of per-axis endpoint halving).
  double trapezoid_weight(std::size_t flat_index) const;

  void validate() const;
};

}  // namespace fieldgen::matcher
