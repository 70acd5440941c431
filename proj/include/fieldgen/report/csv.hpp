#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fieldgen::report {

/// Deterministic CSV emission: fixed %.17g float formatting, caller-ordered
/// rows, no locale surprises.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  void close();

  static std::string format(double v);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::string path_;
};

}  // namespace fieldgen::report
