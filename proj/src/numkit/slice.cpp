#include "fieldgen/numkit/slice.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::numkit {

SliceDist parse_slice_dist(const std::string& name) {
  if (name == "rademacher") return SliceDist::Rademacher;
  if (name == "standard-normal") return SliceDist::StandardNormal;
  if (name == "unit-sphere") return SliceDist::UnitSphere;
  throw std::invalid_argument("unknown slice distribution: " + name);
}

std::string to_string(SliceDist dist) {
  switch (dist) {
    case SliceDist::Rademacher: return "rademacher";
    case SliceDist::StandardNormal: return "standard-normal";
    case SliceDist::UnitSphere: return "unit-sphere";
  }
  return "?";
}

Vec sample_slice(SliceDist dist, int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_slice: dimension must be >= 1");
  Vec v(static_cast<std::size_t>(d));
  switch (dist) {
    case SliceDist::Rademacher:
      for (double& x : v) x = (rng.next_u64() & 1ULL) ? 1.0 : -1.0;
      break;
    case SliceDist::StandardNormal:
      rng.fill_normal(v);
      break;
    case SliceDist::UnitSphere: {
      double n = 0.0;
      do {
        rng.fill_normal(v);
        n = norm(v);
      } while (n < 1e-12);
      for (double& x : v) x /= n;
      break;
    }
  }
  return v;
}

}  // namespace fieldgen::numkit
