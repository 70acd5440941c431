#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "fieldgen/fieldnet/field_pair.hpp"
#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/sample_set.hpp"

namespace fieldgen::dynamics {

using fieldnet::FieldModelPair;
using numkit::RngStream;
using numkit::SampleSet;
using numkit::Vec;

enum class InitKind { StandardNormal, UniformBox, Point };

struct InitDist {
  InitKind kind = InitKind::StandardNormal;
  Vec lo, hi;  // UniformBox bounds, per coordinate
  Vec x0;      // Point

  static InitDist standard_normal() { return {}; }
  static InitDist uniform_box(Vec lo, Vec hi);
  static InitDist point(Vec x0);

  Vec draw(int dim, RngStream& rng) const;
};

struct SdeConfig {
  std::int64_t steps = 300;
  double eta = 0.1;
  InitDist init;
  int chains = 1;
  bool record_trajectories = false;

  void validate() const;
};

struct Trajectory {
  std::vector<Vec> points;  // length steps + 1
  int chain_id = 0;
  std::uint64_t seed = 0;
};

struct SampleRun {
  SampleSet finals;
  std::vector<Trajectory> trajectories;  // populated when record_trajectories
};

/// A chain left the finite domain; carries which chain and at which step.
struct DivergedChainError : std::runtime_error {
  int chain_id;
  std::int64_t step;
  DivergedChainError(int chain, std::int64_t at)
      : std::runtime_error("chain " + std::to_string(chain) + " diverged at step " +
                           std::to_string(at)),
        chain_id(chain),
        step(at) {}
};

/// One Euler-Maruyama update: x + drift * eta + sqrt(diffusion * eta) * z,
/// z ~ N(0, I). diffusion is the squared diffusion coefficient and must be
/// >= 0.
Vec em_step(const Vec& x, const Vec& drift, double diffusion, double eta, RngStream& rng);

/// Drift/diffusion fields of the sampling dynamics: drift approximates the
/// density gradient, diffusion_sq the density itself.
struct FieldFns {
  std::function<Vec(const Vec&)> drift;
  std::function<double(const Vec&)> diffusion_sq;
  int dim = 1;
};

/// Closed-form target with exact density and density gradient.
struct AnalyticTarget {
  std::function<double(const Vec&)> density;
  std::function<Vec(const Vec&)> gradient;
  int dim = 1;
};

/// Integrate dx = drift dt + sqrt(diffusion_sq) dw for all chains. Chain c
/// draws from substream (seed, c), so results do not depend on scheduling
/// order.
SampleRun sample_fields(const FieldFns& fields, const SdeConfig& cfg, std::uint64_t seed);

/// The proxy dynamics with learned fields g, s.
SampleRun sample_learned(const FieldModelPair& pair, const SdeConfig& cfg, std::uint64_t seed);

/// The exact dynamics dx = grad p dt + sqrt(p) dw on a closed-form target.
SampleRun sample_analytic(const AnalyticTarget& target, const SdeConfig& cfg, std::uint64_t seed);

/// Langevin baseline dx = (g / max(s, s_min)) dt + sqrt(2) dw.
SampleRun sample_langevin(const FieldFns& fields, const SdeConfig& cfg, double s_min,
                          std::uint64_t seed);
SampleRun sample_langevin(const AnalyticTarget& target, const SdeConfig& cfg, double s_min,
                          std::uint64_t seed);

FieldFns fields_from_pair(const FieldModelPair& pair);
FieldFns fields_from_analytic(const AnalyticTarget& target);

}  // namespace fieldgen::dynamics
