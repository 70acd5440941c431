#include "fieldgen/metrics/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fieldgen/numkit/slice.hpp"

namespace fieldgen::metrics {

namespace {

// Seeded subsample without replacement (partial Fisher-Yates).
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  RngStream rng(seed, 0xD0D0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

double sorted_l1_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

std::vector<double> scalars_of(const SampleSet& s) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.points[i][0];
  return out;
}

std::vector<double> project(const SampleSet& s, const Vec& dir) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = numkit::dot(s.points[i], dir);
  return out;
}

std::vector<double> matched_subsample(std::vector<double> xs, std::size_t k, std::uint64_t seed) {
  if (xs.size() == k) return xs;
  const auto idx = subsample_indices(xs.size(), k, seed);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = xs[idx[i]];
  return out;
}

}  // namespace

double wasserstein_1d(const SampleSet& a, const SampleSet& b, std::uint64_t subsample_seed) {
  a.require_nonempty();
  b.require_nonempty();
  if (a.dim() != 1 || b.dim() != 1) {
    throw std::invalid_argument("wasserstein_1d: requires 1-D samples");
  }
  const std::size_t k = std::min(a.size(), b.size());
  auto xa = matched_subsample(scalars_of(a), k, subsample_seed);
  auto xb = matched_subsample(scalars_of(b), k, subsample_seed + 1);
  return sorted_l1_distance(std::move(xa), std::move(xb));
}

double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int n_projections,
                          RngStream& rng) {
  a.require_nonempty();
  b.require_nonempty();
  if (n_projections < 1) {
    throw std::invalid_argument("sliced_wasserstein: n_projections must be >= 1");
  }
  if (a.dim() != b.dim()) throw std::invalid_argument("sliced_wasserstein: dimension mismatch");
  const int d = a.dim();
  const std::size_t k = std::min(a.size(), b.size());
  double acc = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    const Vec dir = numkit::sample_slice(numkit::SliceDist::UnitSphere, d, rng);
    auto xa = matched_subsample(project(a, dir), k, rng.seed() + static_cast<std::uint64_t>(p));
    auto xb =
        matched_subsample(project(b, dir), k, rng.seed() + static_cast<std::uint64_t>(p) + 1);
    acc += sorted_l1_distance(std::move(xa), std::move(xb));
  }
  return acc / static_cast<double>(n_projections);
}

double mmd2(const SampleSet& a, const SampleSet& b, double sigma) {
  a.require_nonempty();
  b.require_nonempty();
  if (!(sigma > 0.0)) throw std::invalid_argument("mmd2: sigma must be > 0");
  if (a.dim() != b.dim()) throw std::invalid_argument("mmd2: dimension mismatch");
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  auto kernel_mean = [&](const SampleSet& x, const SampleSet& y) {
    double acc = 0.0;
    for (const Vec& xi : x.points) {
      for (const Vec& yj : y.points) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < xi.size(); ++c) {
          const double diff = xi[c] - yj[c];
          d2 += diff * diff;
        }
        acc += std::exp(-d2 * inv_two_sigma_sq);
      }
    }
    return acc / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
  };
  return kernel_mean(a, a) + kernel_mean(b, b) - 2.0 * kernel_mean(a, b);
}

double median_heuristic_bandwidth(const SampleSet& a, const SampleSet& b, std::size_t max_points,
                                  std::uint64_t seed) {
  a.require_nonempty();
  b.require_nonempty();
  SampleSet pooled;
  pooled.points = a.points;
  pooled.points.insert(pooled.points.end(), b.points.begin(), b.points.end());
  if (pooled.size() > max_points) {
    const auto idx = subsample_indices(pooled.size(), max_points, seed);
    std::vector<Vec> kept(max_points);
    for (std::size_t i = 0; i < max_points; ++i) kept[i] = pooled.points[idx[i]];
    pooled.points = std::move(kept);
  }
  std::vector<double> dists;
  dists.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      dists.push_back(numkit::norm(numkit::sub(pooled.points[i], pooled.points[j])));
    }
  }
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + static_cast<long>(dists.size() / 2),
                   dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

Vec mode_mass(const SampleSet& samples, const std::vector<Vec>& centers) {
  samples.require_nonempty();
  if (centers.empty()) throw std::invalid_argument("mode_mass: no centers");
  Vec mass(centers.size(), 0.0);
  for (const Vec& p : samples.points) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - centers[c][i];
        d2 += diff * diff;
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    mass[best] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(samples.size());
  return mass;
}

}  // namespace fieldgen::metrics
