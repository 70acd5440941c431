#pragma once

#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::numkit {

/// Relaxation kernel width. epsilon is the variance of the isotropic Gaussian
/// that stands in for the Dirac delta inside the matching losses.
struct KernelConfig {
  double epsilon = 0.5;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("KernelConfig: epsilon must be > 0");
  }
};

/// log N(x; mean, var * I_D) for an isotropic Gaussian.
double log_gaussian_pdf(const Vec& x, const Vec& mean, double var);

/// N(x; mean, var * I_D), computed in log space to survive large D / small var.
double gaussian_pdf(const Vec& x, const Vec& mean, double var);

/// 1-D specialization used by the sliced kernels.
double gaussian_pdf_1d(double x, double mean, double var);

}  // namespace fieldgen::numkit
