#include "fieldgen/fieldnet/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldgen::fieldnet {

namespace {

double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// First and second derivative of the layer nonlinearity at preactivation z
// with cached output a.
void d1_d2(Activation act, double z, double a, double& d1, double& d2) {
  switch (act) {
    case Activation::Tanh:
      d1 = 1.0 - a * a;
      d2 = -2.0 * a * d1;
      return;
    case Activation::Softplus: {
      const double s = sigmoid(z);
      d1 = s;
      d2 = s * (1.0 - s);
      return;
    }
    case Activation::Relu:
      d1 = z > 0.0 ? 1.0 : 0.0;
      d2 = 0.0;
      return;
  }
  d1 = d2 = 0.0;
}

void head_d1_d2(OutputHead head, double z, double& d1, double& d2) {
  if (head == OutputHead::Linear) {
    d1 = 1.0;
    d2 = 0.0;
    return;
  }
  const double s = sigmoid(z);
  d1 = s;
  d2 = s * (1.0 - s);
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "softplus") return Activation::Softplus;
  if (name == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
    case Activation::Relu: return "relu";
  }
  return "?";
}

OutputHead parse_output_head(const std::string& name) {
  if (name == "linear") return OutputHead::Linear;
  if (name == "softplus") return OutputHead::Softplus;
  throw std::invalid_argument("unknown output head: " + name);
}

std::string to_string(OutputHead h) {
  return h == OutputHead::Linear ? "linear" : "softplus";
}

std::pair<int, int> MlpSpec::layer_shape(int l) const {
  const int n = num_layers();
  if (l < 0 || l >= n) throw std::invalid_argument("layer_shape: layer index out of range");
  const int in = (l == 0) ? total_input_dim() : hidden_sizes[static_cast<std::size_t>(l - 1)];
  const int out = (l == n - 1) ? output_dim : hidden_sizes[static_cast<std::size_t>(l)];
  return {out, in};
}

int MlpSpec::layer_offset(int l) const {
  int off = 0;
  for (int k = 0; k < l; ++k) {
    auto [out, in] = layer_shape(k);
    off += out * in + out;
  }
  return off;
}

int MlpSpec::param_count() const { return layer_offset(num_layers()); }

void MlpSpec::validate() const {
  if (input_dim < 1) throw std::invalid_argument("MlpSpec: input_dim must be >= 1");
  if (output_dim < 1) throw std::invalid_argument("MlpSpec: output_dim must be >= 1");
  if (condition_dim < 0) throw std::invalid_argument("MlpSpec: condition_dim must be >= 0");
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden sizes must be >= 1");
  }
}

Vec init_params(const MlpSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  Vec params(static_cast<std::size_t>(spec.param_count()), 0.0);
  for (int l = 0; l < spec.num_layers(); ++l) {
    auto [out, in] = spec.layer_shape(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    double* w = params.data() + spec.layer_offset(l);
    for (int i = 0; i < out * in; ++i) w[i] = rng.uniform(-limit, limit);
    // biases stay zero
  }
  return params;
}

namespace {

struct LayerView {
  const double* W;  // out x in, row major
  const double* b;
  int out, in;
};

LayerView layer_view(const MlpSpec& spec, const Vec& params, int l) {
  auto [out, in] = spec.layer_shape(l);
  const double* base = params.data() + spec.layer_offset(l);
  return {base, base + out * in, out, in};
}

Vec concat_input(const MlpSpec& spec, const Vec& x, const Vec* cond) {
  if (static_cast<int>(x.size()) != spec.input_dim) {
    throw std::invalid_argument("mlp: input has dimension " + std::to_string(x.size()) +
                                ", spec expects " + std::to_string(spec.input_dim));
  }
  if (spec.condition_dim > 0) {
    if (cond == nullptr || static_cast<int>(cond->size()) != spec.condition_dim) {
      throw std::invalid_argument("mlp: conditioning vector missing or wrong dimension");
    }
    Vec a0(x);
    a0.insert(a0.end(), cond->begin(), cond->end());
    return a0;
  }
  if (cond != nullptr && !cond->empty()) {
    throw std::invalid_argument("mlp: conditioning vector given but condition_dim == 0");
  }
  return x;
}

void check_params(const MlpSpec& spec, const Vec& params) {
  if (static_cast<int>(params.size()) != spec.param_count()) {
    throw std::invalid_argument("mlp: parameter vector has wrong length");
  }
}

// Shared primal (+ optional tangent) sweep.
Vec run_forward(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec* v,
                const Vec* cond, EvalTrace* trace, Vec* out_tangent) {
  check_params(spec, params);
  const int L = spec.num_layers();
  const bool with_tangent = v != nullptr;

  Vec a = concat_input(spec, x, cond);
  Vec t;
  if (with_tangent) {
    if (v->size() != x.size()) throw std::invalid_argument("mlp jvp: tangent dimension mismatch");
    t.assign(a.size(), 0.0);
    for (std::size_t i = 0; i < v->size(); ++i) t[i] = (*v)[i];
  }

  if (trace) {
    trace->act.assign(1, a);
    trace->pre.clear();
    trace->has_tangent = with_tangent;
    trace->tan.clear();
    trace->pre_tan.clear();
    if (with_tangent) trace->tan.assign(1, t);
  }

  for (int l = 0; l < L; ++l) {
    const LayerView lv = layer_view(spec, params, l);
    Vec z(static_cast<std::size_t>(lv.out));
    Vec tau;
    if (with_tangent) tau.assign(static_cast<std::size_t>(lv.out), 0.0);
    for (int i = 0; i < lv.out; ++i) {
      const double* row = lv.W + static_cast<std::size_t>(i) * lv.in;
      double s = lv.b[i];
      for (int j = 0; j < lv.in; ++j) s += row[j] * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = s;
      if (with_tangent) {
        double st = 0.0;
        for (int j = 0; j < lv.in; ++j) st += row[j] * t[static_cast<std::size_t>(j)];
        tau[static_cast<std::size_t>(i)] = st;
      }
    }

    Vec a_next(z.size());
    Vec t_next;
    if (with_tangent) t_next.assign(z.size(), 0.0);
    if (l < L - 1) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        switch (spec.activation) {
          case Activation::Tanh: a_next[i] = std::tanh(z[i]); break;
          case Activation::Softplus: a_next[i] = softplus(z[i]); break;
          case Activation::Relu: a_next[i] = z[i] > 0.0 ? z[i] : 0.0; break;
        }
        if (with_tangent) {
          double d1, d2;
          d1_d2(spec.activation, z[i], a_next[i], d1, d2);
          t_next[i] = d1 * tau[i];
        }
      }
    } else {
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (spec.output_head == OutputHead::Linear) {
          a_next[i] = z[i];
          if (with_tangent) t_next[i] = tau[i];
        } else {
          a_next[i] = softplus(z[i]);
          if (with_tangent) t_next[i] = sigmoid(z[i]) * tau[i];
        }
      }
    }

    if (trace) {
      trace->pre.push_back(z);
      trace->act.push_back(a_next);
      if (with_tangent) {
        trace->pre_tan.push_back(tau);
        trace->tan.push_back(t_next);
      }
    }
    a = std::move(a_next);
    if (with_tangent) t = std::move(t_next);
  }

  if (out_tangent) *out_tangent = std::move(t);
  return a;
}

}  // namespace

Vec forward(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec* cond,
            EvalTrace* trace) {
  return run_forward(spec, params, x, nullptr, cond, trace, nullptr);
}

double forward_scalar(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec* cond,
                      EvalTrace* trace) {
  if (spec.output_dim != 1) throw std::invalid_argument("forward_scalar: output_dim must be 1");
  return forward(spec, params, x, cond, trace)[0];
}

Vec jvp(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec& v, const Vec* cond,
        EvalTrace* trace) {
  Vec tangent;
  EvalTrace local;
  run_forward(spec, params, x, &v, cond, trace ? trace : &local, &tangent);
  return tangent;
}

void backward(const MlpSpec& spec, const Vec& params, const EvalTrace& trace,
              const Vec& out_adjoint, Vec& param_grad, Vec* input_adjoint) {
  check_params(spec, params);
  if (param_grad.size() != params.size()) {
    throw std::invalid_argument("backward: gradient accumulator has wrong length");
  }
  const int L = spec.num_layers();
  if (static_cast<int>(trace.act.size()) != L + 1) {
    throw std::invalid_argument("backward: trace does not match spec");
  }

  Vec a_bar = out_adjoint;
  for (int l = L - 1; l >= 0; --l) {
    const LayerView lv = layer_view(spec, params, l);
    const Vec& z = trace.pre[static_cast<std::size_t>(l)];
    const Vec& a_out = trace.act[static_cast<std::size_t>(l + 1)];
    const Vec& a_in = trace.act[static_cast<std::size_t>(l)];

    Vec z_bar(static_cast<std::size_t>(lv.out));
    for (int i = 0; i < lv.out; ++i) {
      double d1, d2;
      if (l == L - 1) {
        head_d1_d2(spec.output_head, z[static_cast<std::size_t>(i)], d1, d2);
      } else {
        d1_d2(spec.activation, z[static_cast<std::size_t>(i)], a_out[static_cast<std::size_t>(i)],
              d1, d2);
      }
      z_bar[static_cast<std::size_t>(i)] = d1 * a_bar[static_cast<std::size_t>(i)];
    }

    double* gw = param_grad.data() + spec.layer_offset(l);
    double* gb = gw + lv.out * lv.in;
    for (int i = 0; i < lv.out; ++i) {
      const double zb = z_bar[static_cast<std::size_t>(i)];
      double* grow = gw + static_cast<std::size_t>(i) * lv.in;
      for (int j = 0; j < lv.in; ++j) grow[j] += zb * a_in[static_cast<std::size_t>(j)];
      gb[i] += zb;
    }

    if (l > 0 || input_adjoint != nullptr) {
      Vec prev(static_cast<std::size_t>(lv.in), 0.0);
      for (int i = 0; i < lv.out; ++i) {
        const double zb = z_bar[static_cast<std::size_t>(i)];
        const double* row = lv.W + static_cast<std::size_t>(i) * lv.in;
        for (int j = 0; j < lv.in; ++j) prev[static_cast<std::size_t>(j)] += row[j] * zb;
      }
      if (l == 0) {
        *input_adjoint = std::move(prev);
        return;
      }
      a_bar = std::move(prev);
    }
  }
}

void jvp_backward(const MlpSpec& spec, const Vec& params, const EvalTrace& trace,
                  const Vec& out_adjoint, const Vec& tan_adjoint, Vec& param_grad,
                  Vec* input_adjoint) {
  check_params(spec, params);
  if (!trace.has_tangent) {
    throw std::invalid_argument("jvp_backward: trace has no tangent data (use jvp)");
  }
  if (param_grad.size() != params.size()) {
    throw std::invalid_argument("jvp_backward: gradient accumulator has wrong length");
  }
  const int L = spec.num_layers();

  Vec a_bar = out_adjoint;
  Vec t_bar = tan_adjoint;
  for (int l = L - 1; l >= 0; --l) {
    const LayerView lv = layer_view(spec, params, l);
    const Vec& z = trace.pre[static_cast<std::size_t>(l)];
    const Vec& tau = trace.pre_tan[static_cast<std::size_t>(l)];
    const Vec& a_out = trace.act[static_cast<std::size_t>(l + 1)];
    const Vec& a_in = trace.act[static_cast<std::size_t>(l)];
    const Vec& t_in = trace.tan[static_cast<std::size_t>(l)];

    //   a_out = phi(z),  t_out = phi'(z) * tau
    // so the preactivation adjoint picks up a second-derivative term from the
    // tangent path, and tau gets its own adjoint.
    Vec z_bar(static_cast<std::size_t>(lv.out));
    Vec tau_bar(static_cast<std::size_t>(lv.out));
    for (int i = 0; i < lv.out; ++i) {
      double d1, d2;
      if (l == L - 1) {
        head_d1_d2(spec.output_head, z[static_cast<std::size_t>(i)], d1, d2);
      } else {
        d1_d2(spec.activation, z[static_cast<std::size_t>(i)], a_out[static_cast<std::size_t>(i)],
              d1, d2);
      }
      const std::size_t si = static_cast<std::size_t>(i);
      z_bar[si] = d1 * a_bar[si] + d2 * tau[si] * t_bar[si];
      tau_bar[si] = d1 * t_bar[si];
    }

    double* gw = param_grad.data() + spec.layer_offset(l);
    double* gb = gw + lv.out * lv.in;
    for (int i = 0; i < lv.out; ++i) {
      const std::size_t si = static_cast<std::size_t>(i);
      double* grow = gw + static_cast<std::size_t>(i) * lv.in;
      for (int j = 0; j < lv.in; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        grow[j] += z_bar[si] * a_in[sj] + tau_bar[si] * t_in[sj];
      }
      gb[i] += z_bar[si];
    }

    if (l > 0 || input_adjoint != nullptr) {
      Vec prev_a(static_cast<std::size_t>(lv.in), 0.0);
      Vec prev_t(static_cast<std::size_t>(lv.in), 0.0);
      for (int i = 0; i < lv.out; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double* row = lv.W + static_cast<std::size_t>(i) * lv.in;
        for (int j = 0; j < lv.in; ++j) {
          const std::size_t sj = static_cast<std::size_t>(j);
          prev_a[sj] += row[j] * z_bar[si];
          prev_t[sj] += row[j] * tau_bar[si];
        }
      }
      if (l == 0) {
        if (input_adjoint) *input_adjoint = std::move(prev_a);
        return;
      }
      a_bar = std::move(prev_a);
      t_bar = std::move(prev_t);
    }
  }
}

}  // namespace fieldgen::fieldnet
