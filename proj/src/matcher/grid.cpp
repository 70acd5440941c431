#include "fieldgen/matcher/grid.hpp"

#include <stdexcept>

namespace fieldgen::matcher {

void GridAxis::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("GridAxis: requires lo < hi");
  if (count < 2) throw std::invalid_argument("GridAxis: requires at least 2 nodes");
}

GridDensity GridDensity::zeros(std::vector<GridAxis> axes) {
  GridDensity g;
  g.axes = std::move(axes);
  if (g.axes.empty() || g.axes.size() > 2) {
    throw std::invalid_argument("GridDensity: only 1-D and 2-D grids are supported");
  }
  for (const GridAxis& ax : g.axes) ax.validate();
  g.values.assign(g.node_count(), 0.0);
  return g;
}

std::size_t GridDensity::node_count() const {
  std::size_t n = 1;
  for (const GridAxis& ax : axes) n *= static_cast<std::size_t>(ax.count);
  return n;
}

double& GridDensity::at(int i, int j) {
  return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(axes[1].count) +
                static_cast<std::size_t>(j)];
}

double GridDensity::at(int i, int j) const {
  return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(axes[1].count) +
                static_cast<std::size_t>(j)];
}

double GridDensity::trapezoid_weight(std::size_t flat) const {
  double w = 1.0;
  if (ndim() == 1) {
    const int n = axes[0].count;
    const int i = static_cast<int>(flat);
    w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    return w * axes[0].spacing();
  }
  const int n0 = axes[0].count;
  const int n1 = axes[1].count;
  const int i = static_cast<int>(flat) / n1;
  const int j = static_cast<int>(flat) % n1;
  const double wi = (i == 0 || i == n0 - 1) ? 0.5 : 1.0;
  const double wj = (j == 0 || j == n1 - 1) ? 0.5 : 1.0;
  return wi * wj * axes[0].spacing() * axes[1].spacing();
}

double GridDensity::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += trapezoid_weight(k) * values[k];
  return s;
}

void GridDensity::normalize() {
  const double z = integral();
  if (!(z > 0.0)) throw std::runtime_error("GridDensity::normalize: non-positive integral");
  for (double& v : values) v /= z;
}

void GridDensity::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw std::invalid_argument("GridDensity: only 1-D and 2-D grids are supported");
  }
  for (const GridAxis& ax : axes) ax.validate();
  if (values.size() != node_count()) {
    throw std::invalid_argument("GridDensity: value count does not match grid");
  }
  for (double v : values) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw std::invalid_argument("GridDensity: values must be finite and >= 0");
    }
  }
}

}  // namespace fieldgen::matcher
