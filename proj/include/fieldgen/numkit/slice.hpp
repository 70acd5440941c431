#pragma once

#include <string>

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::numkit {

/// Distribution of the random slice vectors v, w. Rademacher and standard
/// normal both have unit second moment (E[v v^T] = I); unit-sphere vectors
/// have norm 1.
enum class SliceDist {
  Rademacher,
  StandardNormal,
  UnitSphere,
};

SliceDist parse_slice_dist(const std::string& name);
std::string to_string(SliceDist dist);

/// Draw one slice vector of dimension d.
Vec sample_slice(SliceDist dist, int d, RngStream& rng);

}  // namespace fieldgen::numkit
