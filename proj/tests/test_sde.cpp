#include <doctest.h>

#include <cmath>

#include "dkgm/errors.hpp"
#include "dkgm/rng.hpp"
#include "dkgm/sde.hpp"

using namespace dkgm;

namespace {

SdeParams prop1_params() {
  // a = 1, sigma = 1, eta = 0.1, target 1, start chosen so m0 = 1
  SdeParams p;
  p.a = 1.0;
  p.sigma = 1.0;
  p.eta = 0.1;
  p.x0 = 1.0;
  p.start = 1.0 - std::sqrt(2.0);
  return p;
}

}  // namespace

TEST_CASE("phase change point evaluates the closed form") {
  SdeParams p = prop1_params();
  REQUIRE(p.m0() == doctest::Approx(1.0).epsilon(1e-14));
  auto t_star = phase_change_point(p);
  REQUIRE(t_star.has_value());
  // t* = (1/2) log(4*1/(0.1*1) - 1) = 0.5 log 39
  CHECK(*t_star == doctest::Approx(0.5 * std::log(39.0)).epsilon(1e-12));
  CHECK(*t_star == doctest::Approx(1.83178).epsilon(1e-5));
}

TEST_CASE("nonpositive drift slope has no phase change") {
  SdeParams p = prop1_params();
  p.a = -1.0;
  CHECK_FALSE(phase_change_point(p).has_value());
  p.a = 0.0;
  CHECK_FALSE(phase_change_point(p).has_value());
}

TEST_CASE("log boundary raises a domain error") {
  SdeParams p = prop1_params();
  // m0 = eta * sigma / 4 exactly puts the log argument at zero
  p.start = p.x0 - std::sqrt(2.0 * p.eta * p.sigma / 4.0);
  CHECK_THROWS_AS(phase_change_point(p), std::domain_error);
  // just above the boundary is still rejected
  p.start = p.x0 - std::sqrt(2.0 * (p.eta * p.sigma / 4.0) * (1.0 + 1e-14));
  CHECK_THROWS_AS(phase_change_point(p), std::domain_error);
}

TEST_CASE("optimal policy branches") {
  SdeParams p = prop1_params();
  double t_star = *phase_change_point(p);

  SdeParams negative = p;
  negative.a = -2.0;
  CHECK(optimal_policy(negative, 0.0) == 1.0);
  CHECK(optimal_policy(negative, 100.0) == 1.0);

  CHECK(optimal_policy(p, 0.0) == 1.0);
  CHECK(optimal_policy(p, t_star) == 1.0);
  CHECK(optimal_policy(p, t_star + 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  SdeParams steeper = p;
  steeper.a = 2.0;
  double t2 = *phase_change_point(steeper);
  CHECK(optimal_policy(steeper, t2 + 4.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("optimal policy is continuous at the phase change") {
  SdeParams p = prop1_params();
  double t_star = *phase_change_point(p);
  CHECK(optimal_policy(p, t_star) == 1.0);
  CHECK(optimal_policy(p, t_star + 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimal policy is nonincreasing and within [0, 1]") {
  SdeParams p = prop1_params();
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    double t = 20.0 * i / 1000.0;
    double u = optimal_policy(p, t);
    CHECK(u <= prev + 1e-15);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    prev = u;
  }
}

TEST_CASE("optimal policy satisfies the divergence/convergence weight condition") {
  SdeParams p = prop1_params();
  double t_star = *phase_change_point(p);
  double eta = p.eta;
  double sum = 0.0, sq_sum = 0.0;
  double sum_at_half = 0.0, sq_at_half = 0.0;
  const std::size_t K = 10000000;
  for (std::size_t k = 0; k < K; ++k) {
    double t = static_cast<double>(k) * eta;
    double u = t <= t_star ? 1.0 : 1.0 / (1.0 + p.a * (t - t_star));
    double w = u * eta;
    sum += w;
    sq_sum += w * w;
    if (k == K / 2) {
      sum_at_half = sum;
      sq_at_half = sq_sum;
    }
  }
  // the plain sum keeps growing logarithmically: doubling the horizon adds about log 2
  CHECK(sum - sum_at_half > 0.5);
  CHECK(sum - sum_at_half < 1.0);
  // the square sum has Cauchy-settled
  CHECK(sq_sum - sq_at_half < 1e-6);
}

TEST_CASE("policy wrapper kinds") {
  CHECK(Policy::constant(0.25)(3.0) == 0.25);
  CHECK_THROWS_AS(Policy::constant(1.5), std::invalid_argument);
  CHECK(Policy::inverse_time()(0.0) == 1.0);
  CHECK(Policy::inverse_time()(3.0) == doctest::Approx(0.25).epsilon(1e-15));
  SdeParams p = prop1_params();
  Policy opt = Policy::optimal(p);
  CHECK(opt(0.0) == 1.0);
}

TEST_CASE("frozen dynamics keep the cost at m0 exactly") {
  SdeParams p = prop1_params();
  Rng rng(7);
  SdeResult res = simulate_sde(p, Policy::constant(0.0), 2.0, 0.01, 16, rng);
  CHECK(res.m_T == p.m0());
  CHECK(res.std_error == 0.0);
}

TEST_CASE("noiseless case matches the closed-form ODE") {
  // sigma = 0, u = 1, a = 1, target 1, start 0: x_T = 1 - exp(-T)
  SdeParams p;
  p.a = 1.0;
  p.sigma = 0.0;
  p.eta = 0.1;
  p.x0 = 1.0;
  p.start = 0.0;
  Rng rng(11);
  SdeResult res = simulate_sde(p, Policy::constant(1.0), 2.0, 1e-4, 2, rng);
  double expect = 0.5 * std::exp(-4.0);
  CHECK(std::abs(res.m_T - expect) < 1e-3);
}

TEST_CASE("deterministic euler error shrinks linearly in dt") {
  SdeParams p;
  p.a = 1.0;
  p.sigma = 0.0;
  p.eta = 0.1;
  p.x0 = 1.0;
  p.start = 0.0;
  Rng rng(13);
  double exact = 0.5 * std::exp(-4.0);
  double err_coarse =
      std::abs(simulate_sde(p, Policy::constant(1.0), 2.0, 0.02, 1, rng).m_T - exact);
  double err_fine =
      std::abs(simulate_sde(p, Policy::constant(1.0), 2.0, 0.01, 1, rng).m_T - exact);
  CHECK(err_coarse / err_fine == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("optimal policy beats the constant policy on the terminal cost") {
  SdeParams p = prop1_params();
  Rng rng(17);
  SdeResult optimal = simulate_sde(p, Policy::optimal(p), 10.0, 0.01, 2000, rng);
  SdeResult constant = simulate_sde(p, Policy::constant(1.0), 10.0, 0.01, 2000, rng);
  double margin = constant.m_T - optimal.m_T;
  double combined = std::sqrt(optimal.std_error * optimal.std_error +
                              constant.std_error * constant.std_error);
  CHECK(margin > 2.0 * combined);
}

TEST_CASE("simulation is reproducible for a fixed seed") {
  SdeParams p = prop1_params();
  Rng a(23), b(23);
  SdeResult ra = simulate_sde(p, Policy::optimal(p), 5.0, 0.01, 64, a);
  SdeResult rb = simulate_sde(p, Policy::optimal(p), 5.0, 0.01, 64, b);
  CHECK(ra.m_T == rb.m_T);
  CHECK(ra.std_error == rb.std_error);
}

TEST_CASE("simulation validates its inputs") {
  SdeParams p = prop1_params();
  Rng rng(29);
  CHECK_THROWS_AS(simulate_sde(p, Policy::constant(1.0), 1.0, 0.5, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_sde(p, Policy::constant(1.0), 1.0, 0.01, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("diverging dynamics raise a numeric error naming path and step") {
  SdeParams p;
  p.a = -1e200;  // explosive drift away from the target
  p.sigma = 0.0;
  p.eta = 0.1;
  p.x0 = 0.0;
  p.start = 1.0;
  Rng rng(31);
  CHECK_THROWS_AS(simulate_sde(p, Policy::constant(1.0), 1.0, 0.01, 2, rng), NumericError);
  try {
    simulate_sde(p, Policy::constant(1.0), 1.0, 0.01, 2, rng);
  } catch (const NumericError& e) {
    std::string what = e.what();
    CHECK(what.find("path") != std::string::npos);
    CHECK(what.find("step") != std::string::npos);
  }
}

TEST_CASE("path sampling records the requested stride") {
  SdeParams p = prop1_params();
  Rng rng(37);
  SdeResult res = simulate_sde(p, Policy::constant(1.0), 1.0, 0.1, 3, rng, 5);
  // 10 steps per path: samples at k = 0, 5 plus the terminal point
  CHECK(res.samples.size() == 3 * 3);
  CHECK(res.samples.front().path_id == 0);
  CHECK(res.samples.front().t == 0.0);
  CHECK(res.samples.front().x == p.start);
}
