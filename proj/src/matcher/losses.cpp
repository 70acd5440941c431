#include "fieldgen/matcher/losses.hpp"

namespace fieldgen::matcher {

using numkit::dot;
using numkit::gaussian_pdf;
using numkit::gaussian_pdf_1d;

double loss_id_slice(const ScalarField& s, const Vec& x1, const Vec& x2, const Vec& w,
                     const KernelConfig& cfg) {
  cfg.validate();
  const double delta = gaussian_pdf_1d(dot(w, x2), dot(w, x1), cfg.epsilon);
  const double sv = s(x1);
  return sv * sv - 2.0 * sv * delta;
}

double loss_grad_slice(const VectorField& g, const JvpField& g_jvp, const Vec& x1, const Vec& x2,
                       const Vec& v, const Vec& w, const KernelConfig& cfg) {
  cfg.validate();
  const double delta = gaussian_pdf_1d(dot(w, x2), dot(w, x1), cfg.epsilon);
  const double vg = dot(v, g(x1));
  const double vjv = dot(v, g_jvp(x1, v));
  return vg * vg + vjv * delta;
}

double loss_id_full(const ScalarField& s, const Vec& x1, const Vec& x2, const KernelConfig& cfg) {
  cfg.validate();
  const double delta = gaussian_pdf(x2, x1, cfg.epsilon);
  const double sv = s(x1);
  return sv * sv - 2.0 * sv * delta;
}

double loss_grad_full(const VectorField& g, const JvpField& g_jvp, const Vec& x1, const Vec& x2,
                      const Vec& v, const KernelConfig& cfg) {
  cfg.validate();
  const double delta = gaussian_pdf(x2, x1, cfg.epsilon);
  const double vg = dot(v, g(x1));
  const double vjv = dot(v, g_jvp(x1, v));
  return vg * vg + vjv * delta;
}

}  // namespace fieldgen::matcher
