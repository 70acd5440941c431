#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "fieldgen/matcher/grid.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::fpverify {

using matcher::GridAxis;
using matcher::GridDensity;
using numkit::Vec;

/// Requested dt exceeds the explicit scheme's stability bound; the message
/// carries a usable step size.
struct StepSizeError : std::runtime_error {
  double suggested_dt;
  explicit StepSizeError(double suggestion)
      : std::runtime_error("fp_step: dt exceeds the stability bound; use dt <= " +
                           std::to_string(suggestion)),
        suggested_dt(suggestion) {}
};

struct InsufficientSignalError : std::runtime_error {
  InsufficientSignalError()
      : std::runtime_error("fit_decay_rate: KL trace has fewer than 10 points above the floor") {}
};

/// The density evolution of the sampling dynamics on a 1-D grid:
///   dp/dt = d/dx ( -f p + 1/2 d/dx (g^2 p) ),  f = p_target', g^2 = p_target.
/// Discretized as a conservative finite-volume flux with no-flux boundaries,
/// so the plain-sum mass h * sum(p) is conserved to roundoff. When the drift
/// comes from the analytic target derivative the tabulated target is an
/// O(h^2)-accurate stationary state; when the drift is the central difference
/// of the target table the target is stationary to machine precision.
struct FpProblem {
  GridAxis axis;
  Vec target;  // p_target at nodes, trapezoid-normalized
  Vec drift;   // p_target' at nodes

  double max_target() const;
  /// 0.4 h^2 / max(p_target), the enforced explicit-step bound.
  double stable_dt() const;
};

FpProblem make_problem(const GridAxis& axis, const std::function<double(double)>& density,
                       const std::function<double(double)>& density_deriv);
/// Drift from central differences of the table.
FpProblem make_problem(const GridDensity& target);

/// One explicit step. Throws StepSizeError when dt > stable_dt().
Vec fp_step(const Vec& p, const FpProblem& prob, double dt);
GridDensity fp_step(const GridDensity& p, const GridDensity& target, double dt);

/// Trapezoid KL(p || q) with q floored at 1e-300 and non-positive p cells
/// contributing zero.
double kl_on_grid(const Vec& p, const Vec& q, double spacing);
double kl_on_grid(const GridDensity& p, const GridDensity& q);

/// Plain-sum mass h * sum(p) (the quantity the scheme conserves exactly).
double mass_of(const Vec& p, double spacing);

struct FpTrace {
  Vec times;
  Vec kl;
  Vec mass;
  Vec final_p;
};

/// Integrate `steps` explicit steps from p0, recording KL to the target and
/// mass every record_every steps (and at t = 0 and the final step).
FpTrace evolve(const FpProblem& prob, Vec p0, double dt, long steps, long record_every);

/// sup |fp_step(target) - target|, the one-step stationarity residual.
double stationarity_residual(const FpProblem& prob, double dt);

struct DecayFit {
  double alpha_hat = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

/// Least-squares fit of log KL against t over the entries above `floor`;
/// alpha_hat = -slope / 2. Throws InsufficientSignalError with < 10 usable
/// points.
DecayFit fit_decay_rate(const Vec& times, const Vec& kl, double floor = 1e-12);

}  // namespace fieldgen::fpverify
