#pragma once

#include <functional>

#include "fieldgen/numkit/gaussian.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::matcher {

using numkit::KernelConfig;
using numkit::Vec;

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
/// (x, v) -> J(x) v
using JvpField = std::function<Vec(const Vec&, const Vec&)>;

/// Single-sample estimator of the sliced scalar matching loss
///   s(x1)^2 - 2 s(x1) N(w.x2 - w.x1; 0, eps)
/// (the data-dependent constant is dropped).
double loss_id_slice(const ScalarField& s, const Vec& x1, const Vec& x2, const Vec& w,
                     const KernelConfig& cfg);

/// Single-sample estimator of the sliced gradient matching loss
///   (v.g(x1))^2 + (v.J(x1)v) N(w.x2 - w.x1; 0, eps)
double loss_grad_slice(const VectorField& g, const JvpField& g_jvp, const Vec& x1, const Vec& x2,
                       const Vec& v, const Vec& w, const KernelConfig& cfg);

/// Unsliced-w variants: the kernel multiplier is the full D-dimensional
/// isotropic Gaussian N(x2 - x1; 0, eps I).
double loss_id_full(const ScalarField& s, const Vec& x1, const Vec& x2, const KernelConfig& cfg);
double loss_grad_full(const VectorField& g, const JvpField& g_jvp, const Vec& x1, const Vec& x2,
                      const Vec& v, const KernelConfig& cfg);

}  // namespace fieldgen::matcher
