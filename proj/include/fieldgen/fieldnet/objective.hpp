#pragma once

#include <vector>

#include "fieldgen/fieldnet/mlp.hpp"

namespace fieldgen::fieldnet {

/// Scalar objective built from supported primitives over one bound network:
/// constants, network evaluations (u . f(x) and f(x) for scalar heads),
/// input directional derivatives (u . J(x) v), sums, differences, products,
/// squares and constant scalings. Values are computed as the expression is
/// built; grad() runs one exact reverse sweep, dispatching into the network
/// backward passes at each evaluation node.
///
/// Conditioning vectors are registered as slots so their adjoints (needed to
/// train state embeddings) accumulate alongside the parameter gradient.
class Objective {
 public:
  using NodeId = int;

  Objective(const MlpSpec& spec, const Vec& params);

  /// Register a conditioning vector; pass the returned slot to evaluation
  /// nodes. The vector is copied.
  int add_cond(Vec cond);

  NodeId constant(double c);
  /// u . f(x)
  NodeId model_dot(const Vec& x, const Vec& u, int cond_slot = -1);
  /// f(x) for output_dim == 1
  NodeId model_scalar(const Vec& x, int cond_slot = -1);
  /// u . (df/dx)(x) v  — exact, via a forward tangent pass
  NodeId model_jvp_dot(const Vec& x, const Vec& v, const Vec& u, int cond_slot = -1);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId square(NodeId a);
  NodeId scale(NodeId a, double c);

  double value(NodeId id) const;

  /// Gradient of node `root` with respect to the bound parameters. Also
  /// refreshes the per-slot conditioning adjoints.
  Vec grad(NodeId root);

  const Vec& cond_grad(int slot) const;

 private:
  enum class Kind { Constant, ModelDot, ModelScalar, ModelJvpDot, Add, Sub, Mul, Square, Scale };

  struct Node {
    Kind kind;
    double value = 0.0;
    NodeId a = -1, b = -1;
    double c = 0.0;   // Scale factor
    int call = -1;    // index into calls_ for evaluation nodes
  };

  struct ModelCall {
    EvalTrace trace;
    Vec u;
    int cond_slot = -1;
    bool is_jvp = false;
  };

  NodeId push(Node n);

  const MlpSpec& spec_;
  const Vec& params_;
  std::vector<Node> nodes_;
  std::vector<ModelCall> calls_;
  std::vector<Vec> conds_;
  std::vector<Vec> cond_grads_;
};

}  // namespace fieldgen::fieldnet
