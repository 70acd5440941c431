#include "fieldgen/datasets/csv.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fieldgen::datasets {

using numkit::Vec;

Vec Standardizer::apply(const Vec& x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("Standardizer: dimension mismatch");
  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean[i]) / scale[i];
  return z;
}

Vec Standardizer::invert(const Vec& z) const {
  if (z.size() != mean.size()) throw std::invalid_argument("Standardizer: dimension mismatch");
  Vec x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] * scale[i] + mean[i];
  return x;
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim spaces
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !cell.empty();
}

}  // namespace

CsvLoadResult parse_csv(const std::string& text, bool standardize, const std::string& origin) {
  CsvLoadResult result;
  result.samples.source_label = origin;

  std::stringstream ss(text);
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  bool first_content_row = true;
  while (std::getline(ss, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_cells(line);
    if (first_content_row) {
      // header detection: skip the row iff some cell is non-numeric
      bool all_numeric = true;
      double tmp;
      for (const auto& c : cells) all_numeric = all_numeric && parse_number(c, tmp);
      width = cells.size();
      first_content_row = false;
      if (!all_numeric) continue;
    }
    if (cells.size() != width) {
      throw std::runtime_error(origin + ": ragged row " + std::to_string(row) + " (expected " +
                               std::to_string(width) + " columns, got " +
                               std::to_string(cells.size()) + ")");
    }
    Vec point(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], point[c])) {
        throw std::runtime_error(origin + ": non-numeric cell at row " + std::to_string(row) +
                                 ", column " + std::to_string(c + 1) + ": '" + cells[c] + "'");
      }
    }
    result.samples.points.push_back(std::move(point));
  }

  if (standardize && !result.samples.points.empty()) {
    const std::size_t d = result.samples.points.front().size();
    const double n = static_cast<double>(result.samples.size());
    Standardizer tr;
    tr.mean.assign(d, 0.0);
    tr.scale.assign(d, 0.0);
    for (const Vec& p : result.samples.points) {
      for (std::size_t c = 0; c < d; ++c) tr.mean[c] += p[c];
    }
    for (double& m : tr.mean) m /= n;
    for (const Vec& p : result.samples.points) {
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = p[c] - tr.mean[c];
        tr.scale[c] += diff * diff;
      }
    }
    for (double& s : tr.scale) s = std::max(std::sqrt(s / n), 1e-12);
    for (Vec& p : result.samples.points) p = tr.apply(p);
    result.transform = std::move(tr);
  }
  return result;
}

CsvLoadResult load_csv(const std::string& path, bool standardize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), standardize, path);
}

void write_csv(const std::string& path, const numkit::SampleSet& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path);
  const int d = samples.dim();
  for (int c = 0; c < d; ++c) out << (c ? "," : "") << "x_" << (c + 1);
  out << "\n";
  char buf[64];
  for (const Vec& p : samples.points) {
    for (std::size_t c = 0; c < p.size(); ++c) {
      const int len = std::snprintf(buf, sizeof(buf), "%.17g", p[c]);
      if (c) out << ",";
      out.write(buf, len);
    }
    out << "\n";
  }
}

}  // namespace fieldgen::datasets
