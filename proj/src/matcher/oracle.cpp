#include "fieldgen/matcher/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "fieldgen/numkit/gaussian.hpp"

namespace fieldgen::matcher {

OracleFit grid_oracle_fit(const numkit::SampleSet& samples, double epsilon,
                          std::vector<GridAxis> axes) {
  samples.require_nonempty();
  samples.require_uniform_dim();
  if (!(epsilon > 0.0)) throw std::invalid_argument("grid_oracle_fit: epsilon must be > 0");
  const int d = samples.dim();
  if (d != static_cast<int>(axes.size()) || d < 1 || d > 2) {
    throw std::invalid_argument("grid_oracle_fit: needs 1-D or 2-D samples matching the grid");
  }
  for (const Vec& p : samples.points) {
    for (int a = 0; a < d; ++a) {
      const double x = p[static_cast<std::size_t>(a)];
      if (x < axes[static_cast<std::size_t>(a)].lo || x > axes[static_cast<std::size_t>(a)].hi) {
        throw std::domain_error("grid_oracle_fit: sample outside grid domain");
      }
    }
  }

  OracleFit fit;
  fit.density = GridDensity::zeros(axes);
  fit.gradient.assign(static_cast<std::size_t>(d), Vec(fit.density.node_count(), 0.0));

  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const std::size_t nodes = fit.density.node_count();
  Vec x(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < nodes; ++k) {
    if (d == 1) {
      x[0] = axes[0].node(static_cast<int>(k));
    } else {
      const int n1 = axes[1].count;
      x[0] = axes[0].node(static_cast<int>(k) / n1);
      x[1] = axes[1].node(static_cast<int>(k) % n1);
    }
    double dens = 0.0;
    Vec grad(static_cast<std::size_t>(d), 0.0);
    for (const Vec& xi : samples.points) {
      const double kval = numkit::gaussian_pdf(x, xi, epsilon);
      dens += kval;
      // d/dx N(x - xi; 0, eps I) = N * (xi - x) / eps
      for (int a = 0; a < d; ++a) {
        grad[static_cast<std::size_t>(a)] +=
            kval * (xi[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)]) / epsilon;
      }
    }
    fit.density.values[k] = dens * inv_n;
    for (int a = 0; a < d; ++a) {
      fit.gradient[static_cast<std::size_t>(a)][k] = grad[static_cast<std::size_t>(a)] * inv_n;
    }
  }
  return fit;
}

}  // namespace fieldgen::matcher
