#pragma once

#include <optional>
#include <string>

#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::datasets {

/// Per-column affine transform to zero mean / unit variance, invertible.
struct Standardizer {
  numkit::Vec mean;
  numkit::Vec scale;  // standard deviation, floored at 1e-12

  numkit::Vec apply(const numkit::Vec& x) const;
  numkit::Vec invert(const numkit::Vec& z) const;
};

struct CsvLoadResult {
  numkit::SampleSet samples;
  std::optional<Standardizer> transform;  // present when standardize was requested
};

/// Rectangular numeric CSV. A header row is detected and skipped when its
/// cells do not parse as numbers. Parse failures report row and column;
/// ragged rows are a format error.
CsvLoadResult load_csv(const std::string& path, bool standardize);
CsvLoadResult parse_csv(const std::string& text, bool standardize, const std::string& origin);

void write_csv(const std::string& path, const numkit::SampleSet& samples);

}  // namespace fieldgen::datasets
