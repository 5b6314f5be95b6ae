#include "dkgm/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dkgm/errors.hpp"

namespace dkgm {

void MlpSpec::validate() const {
  if (layer_widths.size() < 2)
    throw std::invalid_argument("MlpSpec: need at least input and output widths");
  for (std::size_t w : layer_widths)
    if (w == 0) throw std::invalid_argument("MlpSpec: layer widths must be positive");
  if (skip_connection && layer_widths.front() != layer_widths.back())
    throw std::invalid_argument("MlpSpec: skip connection requires input width == output width");
  if (time_embed_dim % 2 != 0)
    throw std::invalid_argument("MlpSpec: time_embed_dim must be even");
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer_count(); ++l)
    n += layer_widths[l + 1] * layer_input_width(l) + layer_widths[l + 1];
  return n;
}

TimeConditionedNet TimeConditionedNet::zeros(MlpSpec spec) {
  spec.validate();
  std::size_t n = spec.param_count();
  return TimeConditionedNet{std::move(spec), Vec(n, 0.0)};
}

TimeConditionedNet TimeConditionedNet::glorot(MlpSpec spec, Rng& rng) {
  spec.validate();
  TimeConditionedNet net{std::move(spec), Vec(0)};
  net.params.reserve(net.spec.param_count());
  for (std::size_t l = 0; l < net.spec.layer_count(); ++l) {
    std::size_t fan_in = net.spec.layer_input_width(l);
    std::size_t fan_out = net.spec.layer_widths[l + 1];
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < fan_out * fan_in; ++i)
      net.params.push_back(rng.uniform(-bound, bound));
    for (std::size_t i = 0; i < fan_out; ++i) net.params.push_back(0.0);
  }
  return net;
}

Tensor time_embedding(long t, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0)
    throw std::invalid_argument("time_embedding: dim must be even and positive");
  if (t < 0) throw std::invalid_argument("time_embedding: t must be nonnegative");
  Vec e(dim);
  for (std::size_t i = 0; 2 * i < dim; ++i) {
    double angle = static_cast<double>(t) /
                   std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
    e[2 * i] = std::sin(angle);
    e[2 * i + 1] = std::cos(angle);
  }
  return Tensor::vector(std::move(e));
}

namespace {

double activate(Activation a, double z) {
  return a == Activation::Tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// derivative expressed through the post-activation value
double activate_grad(Activation a, double post) {
  return a == Activation::Tanh ? 1.0 - post * post : (post > 0.0 ? 1.0 : 0.0);
}

}  // namespace

NetEval net_forward_cached(const TimeConditionedNet& net, const Vec& x, long t) {
  const MlpSpec& spec = net.spec;
  if (x.size() != spec.input_width())
    throw std::invalid_argument("net_forward: input width mismatch");
  if (net.params.size() != spec.param_count())
    throw std::invalid_argument("net_forward: parameter vector length mismatch");

  NetEval eval;
  eval.input = x;
  if (spec.time_embed_dim > 0) {
    Tensor emb = time_embedding(t, spec.time_embed_dim);
    eval.input.insert(eval.input.end(), emb.values().begin(), emb.values().end());
  }

  std::size_t n_layers = spec.layer_count();
  eval.pre.resize(n_layers);
  eval.post.resize(n_layers);
  const Vec* h = &eval.input;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::size_t in_w = spec.layer_input_width(l);
    std::size_t out_w = spec.layer_widths[l + 1];
    const double* w = net.params.data() + offset;
    const double* b = w + out_w * in_w;
    Vec& z = eval.pre[l];
    z.assign(out_w, 0.0);
    for (std::size_t o = 0; o < out_w; ++o) {
      double s = b[o];
      const double* row = w + o * in_w;
      for (std::size_t i = 0; i < in_w; ++i) s += row[i] * (*h)[i];
      z[o] = s;
    }
    if (l + 1 < n_layers) {
      Vec& a = eval.post[l];
      a.resize(out_w);
      for (std::size_t o = 0; o < out_w; ++o) a[o] = activate(spec.activation, z[o]);
      h = &a;
    } else {
      eval.post[l] = z;  // linear output layer
      h = &eval.post[l];
    }
    offset += out_w * in_w + out_w;
  }

  eval.output = *h;
  if (spec.skip_connection)
    for (std::size_t i = 0; i < x.size(); ++i) eval.output[i] += x[i];
  return eval;
}

NetGradients net_backward_cached(const TimeConditionedNet& net, const NetEval& eval,
                                 const Vec& upstream) {
  const MlpSpec& spec = net.spec;
  if (upstream.size() != spec.output_width())
    throw std::invalid_argument("net_backward: upstream width mismatch");

  NetGradients g;
  g.param_grad.assign(net.params.size(), 0.0);
  std::size_t n_layers = spec.layer_count();

  // layer parameter offsets
  std::vector<std::size_t> offsets(n_layers);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = offset;
    offset += spec.layer_widths[l + 1] * spec.layer_input_width(l) + spec.layer_widths[l + 1];
  }

  Vec delta = upstream;  // d loss / d post-activation of current layer
  for (std::size_t li = n_layers; li-- > 0;) {
    std::size_t in_w = spec.layer_input_width(li);
    std::size_t out_w = spec.layer_widths[li + 1];
    const Vec& layer_in = li == 0 ? eval.input : eval.post[li - 1];

    // through the activation (output layer is linear)
    Vec dz(out_w);
    if (li + 1 < n_layers) {
      for (std::size_t o = 0; o < out_w; ++o)
        dz[o] = delta[o] * activate_grad(spec.activation, eval.post[li][o]);
    } else {
      dz = delta;
    }

    double* dw = g.param_grad.data() + offsets[li];
    double* db = dw + out_w * in_w;
    const double* w = net.params.data() + offsets[li];
    Vec dprev(in_w, 0.0);
    for (std::size_t o = 0; o < out_w; ++o) {
      db[o] += dz[o];
      double* dwrow = dw + o * in_w;
      const double* wrow = w + o * in_w;
      for (std::size_t i = 0; i < in_w; ++i) {
        dwrow[i] += dz[o] * layer_in[i];
        dprev[i] += wrow[i] * dz[o];
      }
    }
    delta = std::move(dprev);
  }

  // delta now holds d loss / d (x ++ embedding); keep the x part only
  g.input_grad.assign(delta.begin(), delta.begin() + spec.input_width());
  if (spec.skip_connection)
    for (std::size_t i = 0; i < spec.input_width(); ++i) g.input_grad[i] += upstream[i];
  return g;
}

Tensor net_forward(const TimeConditionedNet& net, const Tensor& x, long t) {
  NetEval eval = net_forward_cached(net, x.values(), t);
  return Tensor::vector(std::move(eval.output));
}

NetGradients net_backward(const TimeConditionedNet& net, const Tensor& x, long t,
                          const Tensor& upstream) {
  NetEval eval = net_forward_cached(net, x.values(), t);
  return net_backward_cached(net, eval, upstream.values());
}

AdamState AdamState::for_params(std::size_t n, double lr) {
  AdamState s;
  s.lr = lr;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  return s;
}

void AdamState::validate(std::size_t n_params) const {
  if (m.size() != n_params || v.size() != n_params)
    throw std::invalid_argument("AdamState: moment vectors must match parameter length");
  if (lr <= 0.0 || eps <= 0.0) throw std::invalid_argument("AdamState: lr and eps must be positive");
  if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
    throw std::invalid_argument("AdamState: betas must lie in (0, 1)");
}

void adam_step(AdamState& state, Vec& params, const Vec& grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_step: params/grads length mismatch");
  state.validate(params.size());
  state.step += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

double grad_check(const TimeConditionedNet& net, const Tensor& x, long t, double fd_step) {
  if (!(fd_step > 0.0 && fd_step <= 1e-2))
    throw std::invalid_argument("grad_check: fd_step must be in (0, 1e-2]");

  Tensor ones({net.spec.output_width()}, Vec(net.spec.output_width(), 1.0));
  NetGradients analytic = net_backward(net, x, t, ones);

  TimeConditionedNet probe = net;
  auto loss = [&](void) {
    Tensor out = net_forward(probe, x, t);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i];
    return s;
  };

  double worst = 0.0;
  for (std::size_t p = 0; p < probe.params.size(); ++p) {
    double saved = probe.params[p];
    probe.params[p] = saved + fd_step;
    double up = loss();
    probe.params[p] = saved - fd_step;
    double down = loss();
    probe.params[p] = saved;
    double fd = (up - down) / (2.0 * fd_step);
    double a = analytic.param_grad[p];
    double denom = std::max({std::abs(a), std::abs(fd), 1e-12});
    worst = std::max(worst, std::abs(a - fd) / denom);
  }
  return worst;
}

}  // namespace dkgm
