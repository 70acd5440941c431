#include "fieldgen/fieldnet/objective.hpp"

#include <stdexcept>

namespace fieldgen::fieldnet {

Objective::Objective(const MlpSpec& spec, const Vec& params) : spec_(spec), params_(params) {
  if (static_cast<int>(params.size()) != spec.param_count()) {
    throw std::invalid_argument("Objective: parameter vector does not match spec");
  }
}

int Objective::add_cond(Vec cond) {
  conds_.push_back(std::move(cond));
  cond_grads_.emplace_back(conds_.back().size(), 0.0);
  return static_cast<int>(conds_.size()) - 1;
}

Objective::NodeId Objective::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Objective::NodeId Objective::constant(double c) {
  Node n{Kind::Constant};
  n.value = c;
  return push(n);
}

Objective::NodeId Objective::model_dot(const Vec& x, const Vec& u, int cond_slot) {
  ModelCall call;
  call.u = u;
  call.cond_slot = cond_slot;
  const Vec* cond = cond_slot >= 0 ? &conds_[static_cast<std::size_t>(cond_slot)] : nullptr;
  const Vec y = forward(spec_, params_, x, cond, &call.trace);
  Node n{Kind::ModelDot};
  n.value = numkit::dot(u, y);
  n.call = static_cast<int>(calls_.size());
  calls_.push_back(std::move(call));
  return push(n);
}

Objective::NodeId Objective::model_scalar(const Vec& x, int cond_slot) {
  if (spec_.output_dim != 1) {
    throw std::invalid_argument("Objective::model_scalar: output_dim must be 1");
  }
  ModelCall call;
  call.u = Vec{1.0};
  call.cond_slot = cond_slot;
  const Vec* cond = cond_slot >= 0 ? &conds_[static_cast<std::size_t>(cond_slot)] : nullptr;
  const Vec y = forward(spec_, params_, x, cond, &call.trace);
  Node n{Kind::ModelScalar};
  n.value = y[0];
  n.call = static_cast<int>(calls_.size());
  calls_.push_back(std::move(call));
  return push(n);
}

Objective::NodeId Objective::model_jvp_dot(const Vec& x, const Vec& v, const Vec& u,
                                           int cond_slot) {
  ModelCall call;
  call.u = u;
  call.cond_slot = cond_slot;
  call.is_jvp = true;
  const Vec* cond = cond_slot >= 0 ? &conds_[static_cast<std::size_t>(cond_slot)] : nullptr;
  const Vec tangent = jvp(spec_, params_, x, v, cond, &call.trace);
  Node n{Kind::ModelJvpDot};
  n.value = numkit::dot(u, tangent);
  n.call = static_cast<int>(calls_.size());
  calls_.push_back(std::move(call));
  return push(n);
}

Objective::NodeId Objective::add(NodeId a, NodeId b) {
  Node n{Kind::Add};
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value + nodes_[static_cast<std::size_t>(b)].value;
  return push(n);
}

Objective::NodeId Objective::sub(NodeId a, NodeId b) {
  Node n{Kind::Sub};
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value - nodes_[static_cast<std::size_t>(b)].value;
  return push(n);
}

Objective::NodeId Objective::mul(NodeId a, NodeId b) {
  Node n{Kind::Mul};
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value * nodes_[static_cast<std::size_t>(b)].value;
  return push(n);
}

Objective::NodeId Objective::square(NodeId a) {
  Node n{Kind::Square};
  n.a = a;
  const double v = nodes_[static_cast<std::size_t>(a)].value;
  n.value = v * v;
  return push(n);
}

Objective::NodeId Objective::scale(NodeId a, double c) {
  Node n{Kind::Scale};
  n.a = a;
  n.c = c;
  n.value = c * nodes_[static_cast<std::size_t>(a)].value;
  return push(n);
}

double Objective::value(NodeId id) const {
  return nodes_.at(static_cast<std::size_t>(id)).value;
}

Vec Objective::grad(NodeId root) {
  if (root < 0 || root >= static_cast<NodeId>(nodes_.size())) {
    throw std::invalid_argument("Objective::grad: bad root node");
  }
  for (Vec& cg : cond_grads_) std::fill(cg.begin(), cg.end(), 0.0);
  Vec param_grad(params_.size(), 0.0);
  std::vector<double> adj(nodes_.size(), 0.0);
  adj[static_cast<std::size_t>(root)] = 1.0;

  for (NodeId id = root; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const double a_bar = adj[static_cast<std::size_t>(id)];
    if (a_bar == 0.0) continue;
    switch (n.kind) {
      case Kind::Constant:
        break;
      case Kind::Add:
        adj[static_cast<std::size_t>(n.a)] += a_bar;
        adj[static_cast<std::size_t>(n.b)] += a_bar;
        break;
      case Kind::Sub:
        adj[static_cast<std::size_t>(n.a)] += a_bar;
        adj[static_cast<std::size_t>(n.b)] -= a_bar;
        break;
      case Kind::Mul:
        adj[static_cast<std::size_t>(n.a)] += a_bar * nodes_[static_cast<std::size_t>(n.b)].value;
        adj[static_cast<std::size_t>(n.b)] += a_bar * nodes_[static_cast<std::size_t>(n.a)].value;
        break;
      case Kind::Square:
        adj[static_cast<std::size_t>(n.a)] +=
            2.0 * a_bar * nodes_[static_cast<std::size_t>(n.a)].value;
        break;
      case Kind::Scale:
        adj[static_cast<std::size_t>(n.a)] += a_bar * n.c;
        break;
      case Kind::ModelDot:
      case Kind::ModelScalar:
      case Kind::ModelJvpDot: {
        ModelCall& call = calls_[static_cast<std::size_t>(n.call)];
        Vec out_adjoint(call.u.size());
        for (std::size_t i = 0; i < call.u.size(); ++i) out_adjoint[i] = a_bar * call.u[i];
        Vec input_adjoint;
        Vec* input_adjoint_ptr = call.cond_slot >= 0 ? &input_adjoint : nullptr;
        if (n.kind == Kind::ModelJvpDot) {
          const Vec zero(call.u.size(), 0.0);
          jvp_backward(spec_, params_, call.trace, zero, out_adjoint, param_grad,
                       input_adjoint_ptr);
        } else {
          backward(spec_, params_, call.trace, out_adjoint, param_grad, input_adjoint_ptr);
        }
        if (call.cond_slot >= 0) {
          Vec& cg = cond_grads_[static_cast<std::size_t>(call.cond_slot)];
          const std::size_t x_dim = static_cast<std::size_t>(spec_.input_dim);
          for (std::size_t i = 0; i < cg.size(); ++i) cg[i] += input_adjoint[x_dim + i];
        }
        break;
      }
    }
  }
  return param_grad;
}

const Vec& Objective::cond_grad(int slot) const {
  return cond_grads_.at(static_cast<std::size_t>(slot));
}

}  // namespace fieldgen::fieldnet
