#include "fieldgen/report/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace fieldgen::report {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), width_(columns.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot write CSV: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

std::string CsvWriter::format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::invalid_argument("CsvWriter: wrong column count");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ",";
    out_ << format(values[i]);
  }
  out_ << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("CsvWriter: wrong column count");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_.good()) throw std::runtime_error("error finalizing CSV: " + path_);
}

}  // namespace fieldgen::report
