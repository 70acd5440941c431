#include "fieldgen/datasets/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "fieldgen/numkit/gaussian.hpp"

namespace fieldgen::datasets {

void MogSpec::validate() const {
  if (weights.empty() || weights.size() != means.size()) {
    throw std::invalid_argument("MogSpec: weights and means must be non-empty and aligned");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("MogSpec: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("MogSpec: weights must sum to 1");
  }
  const std::size_t d = means.front().size();
  for (const Vec& m : means) {
    if (m.size() != d) throw std::invalid_argument("MogSpec: means must share dimension");
  }
  if (!(var > 0.0)) throw std::invalid_argument("MogSpec: var must be > 0");
}

MogSpec MogSpec::unbalanced_three_mode_2d() {
  MogSpec spec;
  spec.weights = {0.45, 0.45, 0.1};
  spec.means = {{-2.0, -2.0}, {2.0, 2.0}, {2.0, -2.0}};
  spec.var = 0.25;
  return spec;
}

MogSpec MogSpec::gaussian_1d(double mean, double var) {
  MogSpec spec;
  spec.weights = {1.0};
  spec.means = {{mean}};
  spec.var = var;
  return spec;
}

MogSpec MogSpec::bimodal_1d(double separation, double var) {
  MogSpec spec;
  spec.weights = {0.5, 0.5};
  spec.means = {{-separation}, {separation}};
  spec.var = var;
  return spec;
}

SampleSet gen_mog(const MogSpec& spec, int n, RngStream& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("gen_mog: n must be >= 1");
  SampleSet out;
  out.source_label = "mog";
  out.seed = rng.seed();
  out.points.reserve(static_cast<std::size_t>(n));
  const double sd = std::sqrt(spec.var);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    std::size_t comp = 0;
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
      acc += spec.weights[k];
      if (u <= acc) {
        comp = k;
        break;
      }
      comp = k;  // guards against rounding: fall into the last component
    }
    Vec x = spec.means[comp];
    for (double& xi : x) xi += sd * rng.normal();
    out.points.push_back(std::move(x));
  }
  return out;
}

std::pair<double, Vec> mog_fields(const MogSpec& spec, const Vec& x) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.dim()) {
    throw std::invalid_argument("mog_fields: dimension mismatch");
  }
  double density = 0.0;
  Vec grad(x.size(), 0.0);
  for (std::size_t k = 0; k < spec.weights.size(); ++k) {
    const double comp = spec.weights[k] * numkit::gaussian_pdf(x, spec.means[k], spec.var);
    density += comp;
    for (std::size_t i = 0; i < x.size(); ++i) {
      grad[i] += comp * (spec.means[k][i] - x[i]) / spec.var;
    }
  }
  return {density, grad};
}

void SpanSpec::validate() const {
  if (spans.empty()) throw std::invalid_argument("SpanSpec: no spans");
  for (const auto& [lo, hi] : spans) {
    if (!(lo < hi)) throw std::invalid_argument("SpanSpec: each span needs lo < hi");
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    for (std::size_t j = i + 1; j < spans.size(); ++j) {
      if (spans[i].first < spans[j].second && spans[j].first < spans[i].second) {
        throw std::invalid_argument("SpanSpec: spans must be pairwise disjoint");
      }
    }
  }
}

double SpanSpec::total_length() const {
  double total = 0.0;
  for (const auto& [lo, hi] : spans) total += hi - lo;
  return total;
}

SpanSpec SpanSpec::default_three_span() {
  return SpanSpec{{{-1.0, 0.0}, {0.5, 1.0}, {1.5, 2.0}}};
}

SampleSet gen_disjoint_uniform(const SpanSpec& spec, int n, RngStream& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("gen_disjoint_uniform: n must be >= 1");
  SampleSet out;
  out.source_label = "disjoint-uniform";
  out.seed = rng.seed();
  out.points.reserve(static_cast<std::size_t>(n));
  const double total = spec.total_length();
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01() * total;
    double x = spec.spans.back().second;
    for (const auto& [lo, hi] : spec.spans) {
      const double len = hi - lo;
      if (u <= len) {
        x = lo + u;
        break;
      }
      u -= len;
    }
    out.points.push_back({x});
  }
  return out;
}

SampleSet gen_two_moons(int n, double noise, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("gen_two_moons: n must be >= 1");
  if (noise < 0.0) throw std::invalid_argument("gen_two_moons: noise must be >= 0");
  SampleSet out;
  out.source_label = "two-moons";
  out.seed = rng.seed();
  out.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool upper = (rng.next_u64() & 1ULL) == 0;
    const double t = rng.uniform(0.0, M_PI);
    Vec p(2);
    if (upper) {
      p[0] = std::cos(t);
      p[1] = std::sin(t);
    } else {
      p[0] = 1.0 - std::cos(t);
      p[1] = 0.5 - std::sin(t);
    }
    if (noise > 0.0) {
      p[0] += noise * rng.normal();
      p[1] += noise * rng.normal();
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

}  // namespace fieldgen::datasets
