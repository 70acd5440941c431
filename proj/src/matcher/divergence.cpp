#include "fieldgen/matcher/divergence.hpp"

#include <stdexcept>

namespace fieldgen::matcher {

namespace {

void check_shared_grid(const GridDensity& p, const GridDensity& q) {
  if (p.ndim() != q.ndim() || p.values.size() != q.values.size()) {
    throw std::invalid_argument("field divergence: densities on different grids");
  }
  for (int a = 0; a < p.ndim(); ++a) {
    const GridAxis& pa = p.axes[static_cast<std::size_t>(a)];
    const GridAxis& qa = q.axes[static_cast<std::size_t>(a)];
    if (pa.lo != qa.lo || pa.hi != qa.hi || pa.count != qa.count) {
      throw std::invalid_argument("field divergence: densities on different grids");
    }
  }
}

// Central differences along one axis, one-sided at the edges.
Vec table_gradient(const GridDensity& g, int axis) {
  Vec out(g.values.size(), 0.0);
  const double h = g.axes[static_cast<std::size_t>(axis)].spacing();
  if (g.ndim() == 1) {
    const int n = g.axes[0].count;
    for (int i = 0; i < n; ++i) {
      if (i == 0) out[0] = (g.at(1) - g.at(0)) / h;
      else if (i == n - 1) out[static_cast<std::size_t>(i)] = (g.at(i) - g.at(i - 1)) / h;
      else out[static_cast<std::size_t>(i)] = (g.at(i + 1) - g.at(i - 1)) / (2.0 * h);
    }
    return out;
  }
  const int n0 = g.axes[0].count;
  const int n1 = g.axes[1].count;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) +
                            static_cast<std::size_t>(j);
      double v;
      if (axis == 0) {
        if (i == 0) v = (g.at(1, j) - g.at(0, j)) / h;
        else if (i == n0 - 1) v = (g.at(i, j) - g.at(i - 1, j)) / h;
        else v = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * h);
      } else {
        if (j == 0) v = (g.at(i, 1) - g.at(i, 0)) / h;
        else if (j == n1 - 1) v = (g.at(i, j) - g.at(i, j - 1)) / h;
        else v = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * h);
      }
      out[k] = v;
    }
  }
  return out;
}

}  // namespace

double div_grad(const GridDensity& p, const GridDensity& q) {
  check_shared_grid(p, q);
  double acc = 0.0;
  for (int a = 0; a < p.ndim(); ++a) {
    const Vec gp = table_gradient(p, a);
    const Vec gq = table_gradient(q, a);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      const double diff = gp[k] - gq[k];
      acc += p.trapezoid_weight(k) * p.values[k] * diff * diff;
    }
  }
  return acc;
}

double div_id(const GridDensity& p, const GridDensity& q) {
  check_shared_grid(p, q);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    const double diff = p.values[k] - q.values[k];
    acc += p.trapezoid_weight(k) * p.values[k] * diff * diff;
  }
  return acc;
}

}  // namespace fieldgen::matcher
