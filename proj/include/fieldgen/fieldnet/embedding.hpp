#pragma once

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::fieldnet {

/// Learned lookup table mapping a discrete index to a dense vector, used to
/// condition the field networks on environment states.
struct Embedding {
  int count = 0;
  int dim = 0;
  numkit::Vec table;  // count x dim, row major

  static Embedding make(int count, int dim, numkit::RngStream& rng);

  numkit::Vec row(int i) const;
  void add_to_row(int i, const numkit::Vec& delta);  // gradient accumulation target
};

}  // namespace fieldgen::fieldnet
