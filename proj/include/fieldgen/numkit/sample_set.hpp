#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::numkit {

/// A point cloud with uniform dimension plus the provenance needed to
/// reproduce it.
struct SampleSet {
  std::vector<Vec> points;
  std::string source_label;
  std::uint64_t seed = 0;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  std::size_t size() const { return points.size(); }

  void require_nonempty() const {
    if (points.empty()) throw std::invalid_argument("SampleSet: empty sample set");
  }

  void require_uniform_dim() const {
    const std::size_t d = points.empty() ? 0 : points.front().size();
    for (const Vec& p : points) {
      if (p.size() != d) throw std::invalid_argument("SampleSet: non-uniform dimension");
    }
  }
};

}  // namespace fieldgen::numkit
