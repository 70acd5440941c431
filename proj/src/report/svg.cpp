#include "fieldgen/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fieldgen::report {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMargin = 52;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Frame {
  double x_lo, x_hi, y_lo, y_hi;

  double px(double x) const {
    return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin);
  }
};

void open_svg(std::ofstream& out, const std::string& path, const std::string& title) {
  out.open(path);
  if (!out) throw std::runtime_error("cannot write SVG: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
}

void axes(std::ofstream& out, const Frame& f, const std::string& x_label,
          const std::string& y_label) {
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = f.x_lo + (f.x_hi - f.x_lo) * i / 4.0;
    const double fy = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
    out << "<text x=\"" << num(f.px(fx)) << "\" y=\"" << kHeight - kMargin + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(f.py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void svg_histogram_1d(const std::string& path, const numkit::SampleSet& samples, int bins,
                      const std::string& title) {
  samples.require_nonempty();
  if (samples.dim() != 1) throw std::invalid_argument("svg_histogram_1d: 1-D samples only");
  if (bins < 1) throw std::invalid_argument("svg_histogram_1d: bins must be >= 1");
  double lo = samples.points[0][0], hi = lo;
  for (const auto& p : samples.points) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (const auto& p : samples.points) {
    int b = static_cast<int>((p[0] - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double peak = *std::max_element(counts.begin(), counts.end());

  std::ofstream out;
  open_svg(out, path, title);
  const Frame f{lo, hi, 0.0, peak * 1.05};
  axes(out, f, "x", "count");
  const double bw = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double x0 = lo + b * bw;
    const double y = counts[static_cast<std::size_t>(b)];
    if (y == 0.0) continue;
    out << "<rect x=\"" << num(f.px(x0)) << "\" y=\"" << num(f.py(y)) << "\" width=\""
        << num(f.px(x0 + bw) - f.px(x0)) << "\" height=\"" << num(f.py(0) - f.py(y))
        << "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
}

void svg_scatter_2d(const std::string& path, const numkit::SampleSet& samples,
                    const std::string& title, std::size_t max_points) {
  samples.require_nonempty();
  if (samples.dim() != 2) throw std::invalid_argument("svg_scatter_2d: 2-D samples only");
  double xlo = samples.points[0][0], xhi = xlo, ylo = samples.points[0][1], yhi = ylo;
  for (const auto& p : samples.points) {
    xlo = std::min(xlo, p[0]);
    xhi = std::max(xhi, p[0]);
    ylo = std::min(ylo, p[1]);
    yhi = std::max(yhi, p[1]);
  }
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + 1.0;
  const double xpad = 0.05 * (xhi - xlo), ypad = 0.05 * (yhi - ylo);
  std::ofstream out;
  open_svg(out, path, title);
  const Frame f{xlo - xpad, xhi + xpad, ylo - ypad, yhi + ypad};
  axes(out, f, "x1", "x2");
  const std::size_t stride = std::max<std::size_t>(1, samples.size() / max_points);
  for (std::size_t i = 0; i < samples.size(); i += stride) {
    out << "<circle cx=\"" << num(f.px(samples.points[i][0])) << "\" cy=\""
        << num(f.py(samples.points[i][1])) << "\" r=\"1.6\" fill=\"#1f77b4\" opacity=\"0.5\"/>\n";
  }
  out << "</svg>\n";
}

void svg_line_chart(const std::string& path, const std::vector<Series>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_y) {
  if (series.empty()) throw std::invalid_argument("svg_line_chart: no series");
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const Series& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg_line_chart: ragged series");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, ty(s.y[i]));
      yhi = std::max(yhi, ty(s.y[i]));
      if (!s.y_lo.empty()) {
        ylo = std::min(ylo, ty(s.y_lo[i]));
        yhi = std::max(yhi, ty(s.y_hi[i]));
      }
    }
  }
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + 1.0;
  std::ofstream out;
  open_svg(out, path, title);
  const Frame f{xlo, xhi, ylo - 0.05 * (yhi - ylo), yhi + 0.05 * (yhi - ylo)};
  axes(out, f, x_label, log_y ? "log10 " + y_label : y_label);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kColors[si % 6];
    if (!s.y_lo.empty()) {
      out << "<polygon fill=\"" << color << "\" opacity=\"0.15\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << num(f.px(s.x[i])) << "," << num(f.py(ty(s.y_hi[i]))) << " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << num(f.px(s.x[i])) << "," << num(f.py(ty(s.y_lo[i]))) << " ";
      }
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << num(f.px(s.x[i])) << "," << num(f.py(ty(s.y[i]))) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << kMargin + 16 * (si + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
        << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace fieldgen::report
