#include "fieldgen/fpverify/fp.hpp"

#include <algorithm>
#include <cmath>

namespace fieldgen::fpverify {

double FpProblem::max_target() const {
  double m = 0.0;
  for (double t : target) m = std::max(m, t);
  return m;
}

double FpProblem::stable_dt() const {
  const double h = axis.spacing();
  return 0.4 * h * h / std::max(max_target(), 1e-300);
}

namespace {

void normalize_trapezoid(Vec& v, double h, Vec* coupled = nullptr) {
  double z = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    z += w * v[i];
  }
  z *= h;
  if (!(z > 0.0)) throw std::invalid_argument("fpverify: density with non-positive integral");
  for (double& x : v) x /= z;
  if (coupled) {
    for (double& x : *coupled) x /= z;
  }
}

}  // namespace

FpProblem make_problem(const GridAxis& axis, const std::function<double(double)>& density,
                       const std::function<double(double)>& density_deriv) {
  axis.validate();
  FpProblem prob;
  prob.axis = axis;
  prob.target.resize(static_cast<std::size_t>(axis.count));
  prob.drift.resize(static_cast<std::size_t>(axis.count));
  for (int i = 0; i < axis.count; ++i) {
    const double x = axis.node(i);
    prob.target[static_cast<std::size_t>(i)] = density(x);
    prob.drift[static_cast<std::size_t>(i)] = density_deriv(x);
  }
  normalize_trapezoid(prob.target, axis.spacing(), &prob.drift);
  return prob;
}

FpProblem make_problem(const GridDensity& target) {
  target.validate();
  if (target.ndim() != 1) throw std::invalid_argument("fpverify: 1-D targets only");
  FpProblem prob;
  prob.axis = target.axes[0];
  prob.target = target.values;
  normalize_trapezoid(prob.target, prob.axis.spacing());
  const double h = prob.axis.spacing();
  const std::size_t n = prob.target.size();
  prob.drift.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) prob.drift[i] = (prob.target[1] - prob.target[0]) / h;
    else if (i + 1 == n) prob.drift[i] = (prob.target[i] - prob.target[i - 1]) / h;
    else prob.drift[i] = (prob.target[i + 1] - prob.target[i - 1]) / (2.0 * h);
  }
  return prob;
}

Vec fp_step(const Vec& p, const FpProblem& prob, double dt) {
  const std::size_t n = prob.target.size();
  if (p.size() != n) throw std::invalid_argument("fp_step: density does not match the grid");
  if (!(dt > 0.0)) throw std::invalid_argument("fp_step: dt must be > 0");
  const double bound = prob.stable_dt();
  if (dt > bound * (1.0 + 1e-12)) throw StepSizeError(bound);

  const double h = prob.axis.spacing();
  // Interface fluxes  F[i] between nodes i and i+1:
  //   F = -f_{i+1/2} (p_i + p_{i+1})/2 + (t_{i+1} p_{i+1} - t_i p_i) / (2h)
  // with no-flux ends, so sum(p) telescopes and mass is conserved exactly.
  Vec flux(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double f_mid = 0.5 * (prob.drift[i] + prob.drift[i + 1]);
    const double adv = -f_mid * 0.5 * (p[i] + p[i + 1]);
    const double diff = (prob.target[i + 1] * p[i + 1] - prob.target[i] * p[i]) / (2.0 * h);
    flux[i] = adv + diff;
  }
  Vec next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f_right = (i + 1 < n) ? flux[i] : 0.0;
    const double f_left = (i > 0) ? flux[i - 1] : 0.0;
    next[i] = p[i] + dt * (f_right - f_left) / h;
  }
  return next;
}

GridDensity fp_step(const GridDensity& p, const GridDensity& target, double dt) {
  if (p.ndim() != 1 || target.ndim() != 1 || p.axes[0].count != target.axes[0].count ||
      p.axes[0].lo != target.axes[0].lo || p.axes[0].hi != target.axes[0].hi) {
    throw std::invalid_argument("fp_step: p and target must share a 1-D grid");
  }
  const FpProblem prob = make_problem(target);
  GridDensity out = p;
  out.values = fp_step(p.values, prob, dt);
  return out;
}

double kl_on_grid(const Vec& p, const Vec& q, double spacing) {
  if (p.size() != q.size() || p.size() < 2) {
    throw std::invalid_argument("kl_on_grid: mismatched grids");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double qi = std::max(q[i], 1e-300);
    const double w = (i == 0 || i + 1 == p.size()) ? 0.5 : 1.0;
    acc += w * p[i] * std::log(p[i] / qi);
  }
  return acc * spacing;
}

double kl_on_grid(const GridDensity& p, const GridDensity& q) {
  if (p.ndim() != 1 || q.ndim() != 1 || p.axes[0].count != q.axes[0].count ||
      p.axes[0].lo != q.axes[0].lo || p.axes[0].hi != q.axes[0].hi) {
    throw std::invalid_argument("kl_on_grid: densities must share a 1-D grid");
  }
  return kl_on_grid(p.values, q.values, p.axes[0].spacing());
}

double mass_of(const Vec& p, double spacing) {
  double s = 0.0;
  for (double x : p) s += x;
  return s * spacing;
}

FpTrace evolve(const FpProblem& prob, Vec p0, double dt, long steps, long record_every) {
  if (record_every < 1) throw std::invalid_argument("evolve: record_every must be >= 1");
  const double h = prob.axis.spacing();
  FpTrace trace;
  auto record = [&](long step, const Vec& p) {
    trace.times.push_back(dt * static_cast<double>(step));
    trace.kl.push_back(kl_on_grid(p, prob.target, h));
    trace.mass.push_back(mass_of(p, h));
  };
  record(0, p0);
  Vec p = std::move(p0);
  for (long s = 1; s <= steps; ++s) {
    p = fp_step(p, prob, dt);
    if (s % record_every == 0 || s == steps) record(s, p);
  }
  trace.final_p = std::move(p);
  return trace;
}

double stationarity_residual(const FpProblem& prob, double dt) {
  const Vec next = fp_step(prob.target, prob, dt);
  double sup = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    sup = std::max(sup, std::abs(next[i] - prob.target[i]));
  }
  return sup;
}

DecayFit fit_decay_rate(const Vec& times, const Vec& kl, double floor) {
  if (times.size() != kl.size()) throw std::invalid_argument("fit_decay_rate: length mismatch");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < kl.size(); ++i) {
    if (kl[i] > floor) {
      ts.push_back(times[i]);
      ys.push_back(std::log(kl[i]));
    }
  }
  if (ts.size() < 10) throw InsufficientSignalError();
  const double n = static_cast<double>(ts.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-300) throw InsufficientSignalError();
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  double ss_res = 0.0;
  const double mean_y = sy / n;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double pred = intercept + slope * ts[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  DecayFit fit;
  fit.alpha_hat = -0.5 * slope;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = static_cast<int>(ts.size());
  return fit;
}

}  // namespace fieldgen::fpverify
