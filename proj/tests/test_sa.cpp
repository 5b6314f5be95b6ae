#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dkgm/errors.hpp"
#include "dkgm/rng.hpp"
#include "dkgm/sa.hpp"

using namespace dkgm;

namespace {

RestorationOracle linear_oracle(double slope, double sigma) {
  return [slope, sigma](const Vec& x, Rng& rng) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = slope * x[i] + sigma * rng.normal();
    return y;
  };
}

}  // namespace

TEST_CASE("sa_step applies the iteration formula") {
  SaState state{0, {1.0, 1.0}, SaTarget{{0.0, 0.0}}, false, {}};
  sa_step(state, {2.0, 2.0}, 0.5);
  CHECK(state.x_hat[0] == 0.0);
  CHECK(state.x_hat[1] == 0.0);
  CHECK(state.k == 1);
}

TEST_CASE("zero weight or on-target observation leaves the iterate fixed") {
  SaState state{0, {0.7, -0.3}, SaTarget{{1.0, 2.0}}, false, {}};
  Vec before = state.x_hat;
  sa_step(state, {5.0, -5.0}, 0.0);
  CHECK(state.x_hat == before);
  sa_step(state, {1.0, 2.0}, 0.9);  // observation equals the target
  CHECK(state.x_hat == before);
}

TEST_CASE("sa_step validates dimensions and finiteness") {
  SaState state{0, {0.0}, SaTarget{{0.0}}, false, {}};
  CHECK_THROWS_AS(sa_step(state, {1.0, 2.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sa_step(state, {std::nan("")}, 0.1), NumericError);
}

TEST_CASE("one step is affine in the observation") {
  // scaling the correction (alpha - obs) by c equals using weight c * a_k
  Vec alpha{0.4, -1.0};
  Vec obs{2.0, 3.0};
  double a_k = 0.3, c = 1.7;
  SaState lhs{0, {1.0, 1.0}, SaTarget{alpha}, false, {}};
  Vec scaled_obs(2);
  for (int i = 0; i < 2; ++i) scaled_obs[i] = alpha[i] - c * (alpha[i] - obs[i]);
  sa_step(lhs, scaled_obs, a_k);
  SaState rhs{0, {1.0, 1.0}, SaTarget{alpha}, false, {}};
  sa_step(rhs, obs, c * a_k);
  for (int i = 0; i < 2; ++i)
    CHECK(lhs.x_hat[i] == doctest::Approx(rhs.x_hat[i]).epsilon(1e-14));
}

TEST_CASE("averaged step with m = 1 equals a plain step on one draw") {
  RestorationOracle oracle = linear_oracle(2.0, 0.3);
  Rng rng_a(11), rng_b(11);
  SaState a{0, {0.5}, SaTarget{{1.0}}, false, {}};
  SaState b = a;
  sa_step_averaged(a, oracle, 1, 0.4, rng_a);
  sa_step(b, oracle(b.x_hat, rng_b), 0.4);
  CHECK(a.x_hat[0] == b.x_hat[0]);
}

TEST_CASE("averaged step with a deterministic oracle is independent of m") {
  RestorationOracle oracle = [](const Vec& x, Rng&) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.8 * x[i] + 0.1;
    return y;
  };
  Rng rng(13);
  Vec results;
  for (std::size_t m : {std::size_t{1}, std::size_t{3}, std::size_t{8}}) {
    SaState s{0, {0.9}, SaTarget{{0.2}}, false, {}};
    sa_step_averaged(s, oracle, m, 0.5, rng);
    results.push_back(s.x_hat[0]);
  }
  CHECK(results[1] == doctest::Approx(results[0]).epsilon(1e-14));
  CHECK(results[2] == doctest::Approx(results[0]).epsilon(1e-14));
}

TEST_CASE("averaging shrinks the correction variance like 1/m") {
  const double sigma = 0.5;
  const std::size_t m = 4;
  RestorationOracle oracle = [sigma](const Vec& x, Rng& rng) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + sigma * rng.normal();
    return y;
  };
  Rng rng(17);
  const int trials = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    SaState s{0, {0.0}, SaTarget{{0.0}}, false, {}};
    sa_step_averaged(s, oracle, m, 1.0, rng);
    sum += s.x_hat[0];
    sum_sq += s.x_hat[0] * s.x_hat[0];
  }
  double var = sum_sq / trials - (sum / trials) * (sum / trials);
  CHECK(var == doctest::Approx(sigma * sigma / m).epsilon(0.1));
}

TEST_CASE("harmonic schedule is exact") {
  Schedule h = Schedule::harmonic();
  CHECK(h.weight(1) == 1.0);
  CHECK(h.weight(2) == 0.5);
  for (std::size_t k : {std::size_t{3}, std::size_t{7}, std::size_t{100}, std::size_t{12345}}) {
    CHECK(h.weight(k) == 1.0 / static_cast<double>(k));
    CHECK(h.weight(k) * static_cast<double>(k) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(h.weight(0), std::invalid_argument);
}

TEST_CASE("solver stays at the fixed point of the identity map") {
  RestorationOracle oracle = [](const Vec& x, Rng&) { return x; };
  Rng rng(19);
  Vec alpha{0.6, -0.2};
  SaResult res = sa_solve(oracle, SaTarget{alpha}, alpha, Schedule::harmonic(), 100, rng);
  CHECK(res.x_hat == alpha);
}

TEST_CASE("solver finds the root of H(x) = 2x with noise") {
  // root of 2x = 1 is 0.5
  RestorationOracle oracle = linear_oracle(2.0, 0.1);
  SaTarget target{{1.0}};
  int hits = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = make_stream(1000, static_cast<std::uint64_t>(seed));
    SaResult res = sa_solve(oracle, target, {0.0}, Schedule::harmonic(), 10000, rng);
    if (std::abs(res.x_hat[0] - 0.5) < 0.05) hits += 1;
  }
  CHECK(hits >= 95);
}

TEST_CASE("solver converges componentwise for a diagonal linear map") {
  // H(x) = diag(1, 3) x with alpha = (1, 3): roots (1, 1)
  RestorationOracle oracle = [](const Vec& x, Rng& rng) {
    return Vec{x[0] + 0.1 * rng.normal(), 3.0 * x[1] + 0.1 * rng.normal()};
  };
  Rng rng(23);
  SaResult res = sa_solve(oracle, SaTarget{{1.0, 3.0}}, {0.0, 0.0}, Schedule::harmonic(),
                          10000, rng);
  CHECK(res.x_hat[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(res.x_hat[1] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("within-epsilon fraction is nondecreasing in the step budget") {
  for (double slope : {1.0, 2.0}) {
    RestorationOracle oracle = linear_oracle(slope, 0.1);
    SaTarget target{{1.0}};
    double root = 1.0 / slope;
    std::vector<double> fractions;
    std::size_t budget_index = 0;
    for (std::size_t budget : {std::size_t{100}, std::size_t{1000}, std::size_t{10000}}) {
      int hits = 0;
      for (int seed = 0; seed < 100; ++seed) {
        Rng rng = make_stream(2000 + budget_index,
                              static_cast<std::uint64_t>(seed));
        SaResult res = sa_solve(oracle, target, {0.0}, Schedule::harmonic(), budget, rng);
        if (std::abs(res.x_hat[0] - root) < 0.05) hits += 1;
      }
      fractions.push_back(hits / 100.0);
      budget_index += 1;
    }
    CHECK(fractions[1] >= fractions[0]);
    CHECK(fractions[2] >= fractions[1]);
  }
}

TEST_CASE("mean distance to the root shrinks from k = 100 to k = 10000") {
  RestorationOracle oracle = linear_oracle(2.0, 0.1);
  SaTarget target{{1.0}};
  double acc_small = 0.0, acc_large = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng = make_stream(3000, static_cast<std::uint64_t>(seed));
    SaResult res = sa_solve(oracle, target, {0.0}, Schedule::harmonic(), 10000, rng, 1, true);
    acc_small += std::abs(res.trace[100].x[0] - 0.5);
    acc_large += std::abs(res.trace[10000].x[0] - 0.5);
  }
  CHECK(acc_large / 100.0 < acc_small / 100.0);
}

TEST_CASE("trace records every step with distances") {
  RestorationOracle oracle = linear_oracle(1.0, 0.0);
  Rng rng(29);
  SaResult res = sa_solve(oracle, SaTarget{{2.0}}, {0.0}, Schedule::harmonic(), 10, rng, 1, true);
  REQUIRE(res.trace.size() == 11);  // initial state plus 10 steps
  CHECK(res.trace.front().k == 0);
  CHECK(res.trace.back().k == 10);
  CHECK(res.trace.front().distance_to_target == doctest::Approx(2.0));
}

TEST_CASE("harmonic schedule passes the A1 validation") {
  ScheduleDiagnostic d = validate_schedule_a1(Schedule::harmonic(), 1000000);
  // partial sum is ln K + gamma + o(1)
  double expect = std::log(1e6) + 0.5772156649015329;
  CHECK(d.partial_sum == doctest::Approx(expect).epsilon(1e-3));
  CHECK(d.partial_sum == doctest::Approx(14.3927).epsilon(1e-3));
  CHECK(d.partial_square_sum < 1.6449340668482264);  // pi^2 / 6
  CHECK(d.verdict == ScheduleVerdict::Pass);
}

TEST_CASE("constant and summable schedules fail the A1 validation") {
  const std::size_t horizon = 100000;
  Vec constant(horizon, 0.1);
  ScheduleDiagnostic c = validate_schedule_a1(Schedule::custom_weights(constant), horizon);
  CHECK(c.verdict == ScheduleVerdict::Fail);  // square sum diverges

  Vec inverse_square(horizon);
  for (std::size_t k = 1; k <= horizon; ++k)
    inverse_square[k - 1] = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  ScheduleDiagnostic q = validate_schedule_a1(Schedule::custom_weights(inverse_square), horizon);
  CHECK(q.verdict == ScheduleVerdict::Fail);  // plain sum converges
}

TEST_CASE("monotonicity probe counts violations per direction") {
  Box box{{-1.0}, {1.0}};
  Rng rng(31);

  RestorationOracle identity = [](const Vec& x, Rng&) { return x; };
  MonotonicityReport inc = monotonicity_probe(identity, box, 20, 1, rng);
  CHECK(inc.pairs_violated == 0);
  CHECK(inc.pairs_checked == 20 * 19 / 2);

  RestorationOracle negated = [](const Vec& x, Rng&) { return Vec{-x[0]}; };
  MonotonicityReport dec = monotonicity_probe(negated, box, 20, 1, rng);
  CHECK(dec.pairs_violated == dec.pairs_checked);
}

TEST_CASE("cubic map with small noise has under 1 percent violations") {
  RestorationOracle cubic = [](const Vec& x, Rng& rng) {
    return Vec{x[0] * x[0] * x[0] + 0.01 * rng.normal()};
  };
  Rng rng(37);
  MonotonicityReport rep = monotonicity_probe(cubic, Box{{-1.0}, {1.0}}, 50, 1000, rng);
  CHECK(static_cast<double>(rep.pairs_violated) <
        0.01 * static_cast<double>(rep.pairs_checked));
}

TEST_CASE("monotonicity probe covers every axis in 2-d") {
  RestorationOracle identity = [](const Vec& x, Rng&) { return x; };
  Rng rng(41);
  MonotonicityReport rep =
      monotonicity_probe(identity, Box{{-1.0, -1.0}, {1.0, 1.0}}, 5, 1, rng);
  CHECK(rep.violated_per_dim.size() == 2);
  CHECK(rep.pairs_checked == 2 * 5 * (5 * 4 / 2));
  CHECK(rep.pairs_violated == 0);
  CHECK_THROWS_AS(
      monotonicity_probe(identity, Box{{0, 0, 0, 0}, {1, 1, 1, 1}}, 3, 1, rng),
      std::invalid_argument);
}

TEST_CASE("second-moment probe matches the chi-square mean oracle") {
  SaTarget target{{0.0, 0.0, 0.0}};
  std::vector<Vec> points{{0.0, 0.0, 0.0}, {1.0, -1.0, 0.5}};
  Rng rng(43);

  RestorationOracle to_alpha = [](const Vec&, Rng&) { return Vec{0.0, 0.0, 0.0}; };
  CHECK(bounded_second_moment_probe(to_alpha, target, points, 100, rng) == 0.0);

  const double sigma = 0.3;
  RestorationOracle noisy = [sigma](const Vec&, Rng& r) {
    return Vec{sigma * r.normal(), sigma * r.normal(), sigma * r.normal()};
  };
  double est = bounded_second_moment_probe(noisy, target, points, 10000, rng);
  CHECK(est == doctest::Approx(3.0 * sigma * sigma).epsilon(0.1));

  RestorationOracle pass_through = [](const Vec& x, Rng&) { return x; };
  CHECK(bounded_second_moment_probe(pass_through, target, {{0.0, 0.0, 0.0}}, 10, rng) == 0.0);
}

TEST_CASE("trace CSV export has the documented columns") {
  RestorationOracle oracle = linear_oracle(2.0, 0.05);
  Rng rng(47);
  SaResult res = sa_solve(oracle, SaTarget{{1.0}}, {0.0}, Schedule::harmonic(), 5, rng, 1, true);
  auto path = std::filesystem::temp_directory_path() / "dkgm_trace_test.csv";
  write_trace_csv(path, res.trace);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,x_1,distance_to_target");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) rows += line.empty() ? 0 : 1;
  CHECK(rows == res.trace.size());
  std::filesystem::remove(path);
}
