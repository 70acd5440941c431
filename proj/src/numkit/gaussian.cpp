#include "fieldgen/numkit/gaussian.hpp"

#include <cmath>

namespace fieldgen::numkit {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double log_gaussian_pdf(const Vec& x, const Vec& mean, double var) {
  if (x.size() != mean.size()) {
    throw std::invalid_argument("gaussian_pdf: dimension mismatch");
  }
  if (!(var > 0.0)) throw std::invalid_argument("gaussian_pdf: var must be > 0");
  const double d = static_cast<double>(x.size());
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - mean[i];
    q += diff * diff;
  }
  return -0.5 * (d * (kLog2Pi + std::log(var)) + q / var);
}

double gaussian_pdf(const Vec& x, const Vec& mean, double var) {
  return std::exp(log_gaussian_pdf(x, mean, var));
}

double gaussian_pdf_1d(double x, double mean, double var) {
  if (!(var > 0.0)) throw std::invalid_argument("gaussian_pdf_1d: var must be > 0");
  const double diff = x - mean;
  return std::exp(-0.5 * (kLog2Pi + std::log(var)) - 0.5 * diff * diff / var);
}

}  // namespace fieldgen::numkit
