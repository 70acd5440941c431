#pragma once

#include <string>

#include "fieldgen/fieldnet/mlp.hpp"

namespace fieldgen::fieldnet {

/// The two networks of a field model: g approximates the density gradient
/// (vector field, linear head) and s the density itself (scalar field,
/// softplus head so s >= 0 everywhere).
struct FieldModelPair {
  MlpSpec g_spec;
  MlpSpec s_spec;
  Vec g_params;
  Vec s_params;

  static FieldModelPair make(int dim, const std::vector<int>& hidden, Activation activation,
                             int condition_dim, numkit::RngStream& rng);

  Vec g(const Vec& x, const Vec* cond = nullptr) const {
    return forward(g_spec, g_params, x, cond);
  }
  double s(const Vec& x, const Vec* cond = nullptr) const {
    return forward_scalar(s_spec, s_params, x, cond);
  }
  Vec g_jvp(const Vec& x, const Vec& v, const Vec* cond = nullptr) const {
    return jvp(g_spec, g_params, x, v, cond);
  }

  int dim() const { return g_spec.input_dim; }
};

inline constexpr int kCheckpointFormatVersion = 1;

/// JSON checkpoint: format version, both specs, parameters in layer order.
void save_checkpoint(const FieldModelPair& pair, const std::string& path);
FieldModelPair load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const FieldModelPair& pair);
FieldModelPair checkpoint_from_string(const std::string& text);

}  // namespace fieldgen::fieldnet
