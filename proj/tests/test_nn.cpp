#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dkgm/nn.hpp"
#include "dkgm/rng.hpp"

using namespace dkgm;

namespace {

MlpSpec make_spec(std::vector<std::size_t> widths, Activation act = Activation::Tanh,
                  bool skip = false, std::size_t ted = 0) {
  MlpSpec s;
  s.layer_widths = std::move(widths);
  s.activation = act;
  s.skip_connection = skip;
  s.time_embed_dim = ted;
  return s;
}

TimeConditionedNet random_net(MlpSpec spec, Rng& rng, double scale = 0.7) {
  TimeConditionedNet net = TimeConditionedNet::zeros(spec);
  for (double& p : net.params) p = rng.uniform(-scale, scale);
  return net;
}

// independent central-difference gradient of sum(output) w.r.t. parameters
Vec fd_param_grad(const TimeConditionedNet& net, const Tensor& x, long t, double h) {
  TimeConditionedNet probe = net;
  Vec grad(net.params.size());
  auto loss = [&]() {
    Tensor out = net_forward(probe, x, t);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out[i];
    return s;
  };
  for (std::size_t p = 0; p < grad.size(); ++p) {
    double saved = probe.params[p];
    probe.params[p] = saved + h;
    double up = loss();
    probe.params[p] = saved - h;
    double down = loss();
    probe.params[p] = saved;
    grad[p] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace

TEST_CASE("time embedding at t = 0 alternates 0 and 1") {
  Tensor e = time_embedding(0, 4);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == 1.0);
  CHECK(e[2] == 0.0);
  CHECK(e[3] == 1.0);
}

TEST_CASE("time embedding matches the scalar transcendentals") {
  Tensor e = time_embedding(1, 2);
  CHECK(e[0] == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
  CHECK(e[0] == doctest::Approx(0.84147).epsilon(1e-5));
  CHECK(e[1] == doctest::Approx(0.54030).epsilon(1e-5));
}

TEST_CASE("time embedding entries stay in [-1, 1]") {
  for (long t : {0L, 1L, 5L, 17L, 10000L}) {
    for (std::size_t dim : {std::size_t{2}, std::size_t{8}, std::size_t{16}}) {
      Tensor e = time_embedding(t, dim);
      for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(e[i] >= -1.0);
        CHECK(e[i] <= 1.0);
      }
    }
  }
}

TEST_CASE("time embedding rejects odd dims") {
  CHECK_THROWS_AS(time_embedding(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(time_embedding(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(time_embedding(-1, 4), std::invalid_argument);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_spec({3}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_spec({2, 0, 2}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_spec({2, 4, 3}, Activation::Tanh, true).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_spec({2, 4, 2}, Activation::Tanh, false, 3).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(make_spec({2, 4, 2}, Activation::Relu, true, 4).validate());
}

TEST_CASE("parameter count is a pure function of the spec") {
  MlpSpec s = make_spec({2, 4, 2}, Activation::Tanh, false, 6);
  // layer 0: 4 x (2 + 6) + 4, layer 1: 2 x 4 + 2
  CHECK(s.param_count() == 4 * 8 + 4 + 2 * 4 + 2);
  CHECK(TimeConditionedNet::zeros(s).params.size() == s.param_count());
  Rng rng(3);
  CHECK(TimeConditionedNet::glorot(s, rng).params.size() == s.param_count());
}

TEST_CASE("zero net with skip is the identity") {
  TimeConditionedNet net = TimeConditionedNet::zeros(make_spec({3, 5, 3}, Activation::Tanh, true));
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor x = Tensor::vector(rng.normal_vec(3));
    Tensor y = net_forward(net, x, 0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == x[i]);
  }
}

TEST_CASE("zero net without skip returns zero") {
  TimeConditionedNet net = TimeConditionedNet::zeros(make_spec({3, 5, 3}));
  Tensor y = net_forward(net, Tensor::vector({1.0, -2.0, 0.5}), 2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == 0.0);
}

TEST_CASE("zero-parameter tanh encoder maps the origin to zero") {
  TimeConditionedNet net = TimeConditionedNet::zeros(make_spec({2, 4, 8, 1}));
  Tensor y = net_forward(net, Tensor::vector({0.0, 0.0}), 0);
  CHECK(y.size() == 1);
  CHECK(y[0] == 0.0);
}

TEST_CASE("forward rejects shape mismatches") {
  TimeConditionedNet net = TimeConditionedNet::zeros(make_spec({3, 2}));
  CHECK_THROWS_AS(net_forward(net, Tensor::vector({1.0, 2.0}), 0), std::invalid_argument);
  CHECK_THROWS_AS(net_backward(net, Tensor::vector({1.0, 2.0, 3.0}), 0,
                               Tensor::vector({1.0, 2.0, 3.0})),
                  std::invalid_argument);
}

TEST_CASE("single linear layer gradient is g x^T and g") {
  // y = W x + b, widths 2 -> 3
  Rng rng(21);
  TimeConditionedNet net = random_net(make_spec({2, 3}), rng);
  Vec x{0.3, -1.2};
  Vec g{2.0, -0.5, 1.5};
  NetGradients grads = net_backward(net, Tensor::vector(x), 0, Tensor::vector(g));
  // layout: 3x2 weight then 3 biases
  for (std::size_t o = 0; o < 3; ++o) {
    for (std::size_t i = 0; i < 2; ++i) CHECK(grads.param_grad[o * 2 + i] == g[o] * x[i]);
    CHECK(grads.param_grad[6 + o] == g[o]);
  }
  // input grad is W^T g
  for (std::size_t i = 0; i < 2; ++i) {
    double expect = 0.0;
    for (std::size_t o = 0; o < 3; ++o) expect += net.params[o * 2 + i] * g[o];
    CHECK(grads.input_grad[i] == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("zero upstream gradient gives zero parameter gradient") {
  Rng rng(31);
  TimeConditionedNet net = random_net(make_spec({2, 4, 2}, Activation::Tanh, true, 4), rng);
  NetGradients g = net_backward(net, Tensor::vector({0.4, 0.9}), 3, Tensor::vector({0.0, 0.0}));
  for (double v : g.param_grad) CHECK(v == 0.0);
}

TEST_CASE("backward matches the independent finite-difference oracle") {
  Rng rng(41);
  TimeConditionedNet net = random_net(make_spec({2, 4, 3, 2}, Activation::Tanh, true, 4), rng);
  Tensor x = Tensor::vector({0.25, -0.8});
  Vec fd = fd_param_grad(net, x, 2, 1e-5);
  Tensor ones({2}, Vec{1.0, 1.0});
  NetGradients analytic = net_backward(net, x, 2, ones);
  for (std::size_t p = 0; p < fd.size(); ++p) {
    double denom = std::max({std::abs(fd[p]), std::abs(analytic.param_grad[p]), 1e-12});
    CHECK(std::abs(fd[p] - analytic.param_grad[p]) / denom < 1e-6);
  }
}

TEST_CASE("grad_check is tiny for linear nets and small for tanh nets") {
  Rng rng(51);
  TimeConditionedNet linear = random_net(make_spec({3, 3}), rng);
  CHECK(grad_check(linear, Tensor::vector({0.1, 0.5, -0.4}), 0, 1e-5) < 1e-8);

  TimeConditionedNet tanh_net = random_net(make_spec({3, 6, 3}, Activation::Tanh), rng);
  CHECK(grad_check(tanh_net, Tensor::vector({0.1, 0.5, -0.4}), 0, 1e-5) < 1e-4);

  TimeConditionedNet zero = TimeConditionedNet::zeros(make_spec({2, 2}));
  CHECK(grad_check(zero, Tensor::vector({1.0, 2.0}), 0, 1e-5) < 1e-10);

  CHECK_THROWS_AS(grad_check(linear, Tensor::vector({0.1, 0.5, -0.4}), 0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("gradient correctness over 100 random nets") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n_hidden = rng.index(2) + 1;
    std::vector<std::size_t> widths;
    std::size_t io = rng.index(3) + 1;
    widths.push_back(io);
    for (std::size_t l = 0; l < n_hidden; ++l) widths.push_back(rng.index(5) + 2);
    widths.push_back(io);
    Activation act = rng.index(4) == 0 ? Activation::Relu : Activation::Tanh;
    bool skip = rng.index(2) == 1;
    std::size_t ted = 2 * rng.index(3);
    TimeConditionedNet net = random_net(make_spec(widths, act, skip, ted), rng);
    Tensor x = Tensor::vector(rng.normal_vec(io));
    long t = static_cast<long>(rng.index(6));
    CHECK(grad_check(net, x, t, 1e-5) < 1e-4);
  }
}

TEST_CASE("forward is deterministic bit for bit") {
  Rng rng(71);
  TimeConditionedNet net = random_net(make_spec({4, 8, 4}, Activation::Tanh, true, 8), rng);
  Tensor x = Tensor::vector(rng.normal_vec(4));
  Tensor a = net_forward(net, x, 7);
  Tensor b = net_forward(net, x, 7);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
  AdamState state = AdamState::for_params(3, 0.1);
  Vec params{1.0, -2.0, 0.5};
  Vec before = params;
  Vec zero(3, 0.0);
  for (int i = 0; i < 5; ++i) adam_step(state, params, zero);
  CHECK(params == before);
  CHECK(state.step == 5);
}

TEST_CASE("first adam step moves by at most the learning rate") {
  AdamState state = AdamState::for_params(2, 0.1);
  Vec params{0.0, 0.0};
  Vec grads{3.0, -0.004};
  adam_step(state, params, grads);
  // bias-corrected first step is -lr * g / (|g| + eps)
  CHECK(params[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(0.1).epsilon(1e-4));
  CHECK(std::abs(params[0]) <= 0.1);
  CHECK(std::abs(params[1]) <= 0.1);
}

TEST_CASE("adam updates are bit-reproducible") {
  auto run = []() {
    AdamState state = AdamState::for_params(3);
    Vec params{0.2, -0.4, 1.0};
    Vec grads{0.1, 0.2, -0.3};
    adam_step(state, params, grads);
    adam_step(state, params, grads);
    return params;
  };
  CHECK(run() == run());
}

TEST_CASE("adam rejects mismatched lengths") {
  AdamState state = AdamState::for_params(2);
  Vec params{1.0, 2.0};
  Vec grads{1.0};
  CHECK_THROWS_AS(adam_step(state, params, grads), std::invalid_argument);
}
