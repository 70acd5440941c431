#pragma once

#include <string>
#include <vector>

#include "fieldgen/numkit/rng.hpp"
#include "fieldgen/numkit/vec.hpp"

namespace fieldgen::fieldnet {

using numkit::Vec;

enum class Activation { Tanh, Softplus, Relu };
enum class OutputHead { Linear, Softplus };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);
OutputHead parse_output_head(const std::string& name);
std::string to_string(OutputHead h);

/// Architecture of a small feed-forward network. When condition_dim > 0 the
/// conditioning vector is appended to the input before the first layer.
///
/// Parameter layout (the checkpoint contract): for each affine layer in
/// order, the weight matrix row-major (out x in) followed by the bias vector.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_sizes;
  int output_dim = 1;
  Activation activation = Activation::Tanh;
  OutputHead output_head = OutputHead::Linear;
  int condition_dim = 0;

  int total_input_dim() const { return input_dim + condition_dim; }
  int num_layers() const { return static_cast<int>(hidden_sizes.size()) + 1; }

  /// (out, in) of affine layer l.
  std::pair<int, int> layer_shape(int l) const;
  /// Offset of layer l's weights in the flat parameter vector.
  int layer_offset(int l) const;
  int param_count() const;

  void validate() const;
};

/// Per-evaluation scratch: activations (and tangents, for jvp) of every
/// layer. A trace captured by forward/jvp is what backward consumes, so
/// evaluation never mutates the parameters and frozen models are safe to
/// share across threads.
struct EvalTrace {
  std::vector<Vec> act;      // act[0] = input (x ++ cond), act[l] = layer l output
  std::vector<Vec> pre;      // pre[l] = affine output of layer l+1 (0-based)
  std::vector<Vec> tan;      // tangent of act (jvp only)
  std::vector<Vec> pre_tan;  // tangent of pre (jvp only)
  bool has_tangent = false;
};

/// Xavier-uniform weights, zero biases.
Vec init_params(const MlpSpec& spec, numkit::RngStream& rng);

/// Evaluate the network. cond must be non-null iff condition_dim > 0.
Vec forward(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec* cond = nullptr,
            EvalTrace* trace = nullptr);

/// Scalar convenience for output_dim == 1 heads.
double forward_scalar(const MlpSpec& spec, const Vec& params, const Vec& x,
                      const Vec* cond = nullptr, EvalTrace* trace = nullptr);

/// Directional derivative of the network output with respect to x along v,
/// i.e. (dF/dx) v, propagated forward together with the primal pass. The
/// conditioning input carries zero tangent. Returns the output tangent; the
/// primal output lands in trace->act.back() when a trace is supplied.
Vec jvp(const MlpSpec& spec, const Vec& params, const Vec& x, const Vec& v,
        const Vec* cond = nullptr, EvalTrace* trace = nullptr);

/// Reverse pass over a plain forward trace: accumulates d(out_adjoint . F)/dparams
/// into param_grad (+=) and optionally the adjoint of the concatenated input.
void backward(const MlpSpec& spec, const Vec& params, const EvalTrace& trace,
              const Vec& out_adjoint, Vec& param_grad, Vec* input_adjoint = nullptr);

/// Reverse pass over a jvp trace (reverse over the forward-tangent graph):
/// accumulates the parameter gradient of
///   out_adjoint . F(x)  +  tan_adjoint . (dF/dx) v
/// into param_grad. This is what differentiates the v^T (dg/dx) v term of the
/// sliced gradient loss exactly, without materializing the Jacobian.
void jvp_backward(const MlpSpec& spec, const Vec& params, const EvalTrace& trace,
                  const Vec& out_adjoint, const Vec& tan_adjoint, Vec& param_grad,
                  Vec* input_adjoint = nullptr);

}  // namespace fieldgen::fieldnet
