#pragma once

#include <cstddef>
#include <vector>

#include "dkgm/rng.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

enum class Activation { Tanh, Relu };

/// Architecture of the fully connected network used throughout: a stack of
/// linear layers with the activation applied after every layer except the
/// last. When time_embed_dim > 0 the sinusoidal embedding of the step index
/// is concatenated to the input before the first layer; when skip_connection
/// is set the raw input is added to the output (widths must match).
struct MlpSpec {
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::Tanh;
  bool skip_connection = false;
  std::size_t time_embed_dim = 0;

  void validate() const;  // throws std::invalid_argument

  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t output_width() const { return layer_widths.back(); }
  std::size_t layer_count() const { return layer_widths.size() - 1; }
  std::size_t layer_input_width(std::size_t layer) const {
    return layer_widths[layer] + (layer == 0 ? time_embed_dim : 0);
  }
  std::size_t param_count() const;
};

/// Network parameters live in one flat vector, per layer in order: the
/// row-major weight matrix [out x in], then the bias [out].
struct TimeConditionedNet {
  MlpSpec spec;
  Vec params;

  static TimeConditionedNet zeros(MlpSpec spec);
  /// weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero
  static TimeConditionedNet glorot(MlpSpec spec, Rng& rng);
};

/// entry 2i = sin(t / 10000^(2i/dim)), entry 2i+1 = cos of the same angle
Tensor time_embedding(long t, std::size_t dim);

Tensor net_forward(const TimeConditionedNet& net, const Tensor& x, long t);

struct NetGradients {
  Vec param_grad;
  Vec input_grad;  // w.r.t. x only, not the embedding
};

/// Exact reverse-mode gradient of the forward pass for the given upstream
/// (d loss / d output) vector.
NetGradients net_backward(const TimeConditionedNet& net, const Tensor& x, long t,
                          const Tensor& upstream);

/// Forward pass with cached activations, for call sites that backprop
/// through several chained evaluations of the same network.
struct NetEval {
  Vec input;                    // x with the embedding appended
  std::vector<Vec> pre;         // pre-activation per layer
  std::vector<Vec> post;        // post-activation per layer
  Vec output;
};
NetEval net_forward_cached(const TimeConditionedNet& net, const Vec& x, long t);
NetGradients net_backward_cached(const TimeConditionedNet& net, const NetEval& eval,
                                 const Vec& upstream);

struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Vec m;  // first moments
  Vec v;  // second moments
  long step = 0;

  static AdamState for_params(std::size_t n, double lr = 3e-4);
  void validate(std::size_t n_params) const;
};

/// Standard Adam update with bias correction; increments the step counter.
void adam_step(AdamState& state, Vec& params, const Vec& grads);

/// Max over parameters of |analytic - central difference| / max(|analytic|,
/// |fd|, 1e-12) for the scalar loss sum(output). fd_step must be in (0, 1e-2].
double grad_check(const TimeConditionedNet& net, const Tensor& x, long t, double fd_step);

}  // namespace dkgm
