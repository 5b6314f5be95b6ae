#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "dkgm/rng.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

/// A stochastic reconstruction map: given an input vector and an RNG
/// stream, returns one random reconstruction drawn from the conditional
/// law F(.|x). Its conditional mean is the restoration map the solver
/// finds roots of.
using RestorationOracle = std::function<Vec(const Vec&, Rng&)>;

enum class ScheduleKind { Harmonic, ScaledHarmonic, Custom };

/// Weight sequence a_k, k >= 1. Harmonic is exactly 1/k.
struct Schedule {
  ScheduleKind kind = ScheduleKind::Harmonic;
  double scale = 1.0;  // c of scaled_harmonic
  Vec custom;

  static Schedule harmonic() { return Schedule{}; }
  static Schedule scaled_harmonic(double c);
  static Schedule custom_weights(Vec weights);

  double weight(std::size_t k) const;  // throws on k == 0 or exhausted custom list
};

struct SaTarget {
  Vec alpha;
  void validate() const;
};

struct TracePoint {
  std::size_t k;
  Vec x;
  double distance_to_target;
};

struct SaState {
  std::size_t k = 0;
  Vec x_hat;
  SaTarget target;
  bool record_trace = false;
  std::vector<TracePoint> trace;
};

/// One iteration x_{k+1} = x_k + a_k (alpha - observation); appends to the
/// trace when enabled. Throws NumericError on a non-finite observation or
/// iterate, std::invalid_argument on dimension mismatch.
void sa_step(SaState& state, const Vec& observation, double a_k);

/// Same update with the observation replaced by the mean of m oracle draws.
void sa_step_averaged(SaState& state, const RestorationOracle& oracle, std::size_t m,
                      double a_k, Rng& rng);

struct SaResult {
  Vec x_hat;
  std::vector<TracePoint> trace;
};

SaResult sa_solve(const RestorationOracle& oracle, const SaTarget& target, const Vec& x0,
                  const Schedule& schedule, std::size_t n_steps, Rng& rng,
                  std::size_t averaging_m = 1, bool record_trace = false);

enum class ScheduleVerdict { Pass, Fail, Inconclusive };

struct ScheduleDiagnostic {
  double partial_sum;
  double partial_square_sum;
  ScheduleVerdict verdict;
};

/// Numeric partial sums of a_k and a_k^2 up to the horizon, plus a verdict
/// on the divergent-sum / convergent-square-sum condition. Harmonic and
/// scaled-harmonic schedules pass analytically; other schedules are judged
/// by the growth of the second-half partial sums.
ScheduleDiagnostic validate_schedule_a1(const Schedule& schedule, std::size_t horizon);

struct Box {
  Vec lo;
  Vec hi;
  void validate() const;
  std::size_t dim() const { return lo.size(); }
};

struct MonotonicityReport {
  std::size_t pairs_checked = 0;
  std::size_t pairs_violated = 0;
  std::vector<std::size_t> violated_per_dim;
};

/// Spot check of the coordinatewise-increasing assumptions: estimates the
/// mean map on a grid over the box (d <= 3) and counts ordered pairs along
/// each axis where coordinate i of the estimate fails to increase with
/// x_i. A diagnostic, not a proof.
MonotonicityReport monotonicity_probe(const RestorationOracle& oracle, const Box& box,
                                      std::size_t grid_points, std::size_t n_draws, Rng& rng);

/// Max over probe points of the Monte-Carlo estimate of E||x~ - alpha||^2;
/// an empirical stand-in for the uniform second-moment bound.
double bounded_second_moment_probe(const RestorationOracle& oracle, const SaTarget& target,
                                   const std::vector<Vec>& points, std::size_t n_draws,
                                   Rng& rng);

/// CSV columns: k, x_1..x_d, distance_to_target.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace);

}  // namespace dkgm
