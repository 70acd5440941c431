#pragma once

#include <string>
#include <vector>

#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::report {

/// Self-contained deterministic SVG renders (no external assets, fixed
/// number formatting). CSV stays the ground truth; these are quick looks.

void svg_histogram_1d(const std::string& path, const numkit::SampleSet& samples, int bins,
                      const std::string& title);

void svg_scatter_2d(const std::string& path, const numkit::SampleSet& samples,
                    const std::string& title, std::size_t max_points = 4000);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_lo;  // optional band
  std::vector<double> y_hi;
};

void svg_line_chart(const std::string& path, const std::vector<Series>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_y = false);

}  // namespace fieldgen::report
