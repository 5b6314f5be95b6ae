#include "dkgm/sa.hpp"

#include <cmath>
#include <stdexcept>

#include "dkgm/csv.hpp"
#include "dkgm/errors.hpp"

namespace dkgm {

Schedule Schedule::scaled_harmonic(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("Schedule: scale must be positive");
  return Schedule{ScheduleKind::ScaledHarmonic, c, {}};
}

Schedule Schedule::custom_weights(Vec weights) {
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("Schedule: custom weights must be finite and nonnegative");
  return Schedule{ScheduleKind::Custom, 1.0, std::move(weights)};
}

double Schedule::weight(std::size_t k) const {
  if (k == 0) throw std::invalid_argument("Schedule: weights are indexed from k = 1");
  switch (kind) {
    case ScheduleKind::Harmonic:
      return 1.0 / static_cast<double>(k);
    case ScheduleKind::ScaledHarmonic:
      return scale / static_cast<double>(k);
    case ScheduleKind::Custom:
      if (k > custom.size()) throw std::invalid_argument("Schedule: custom weight list exhausted");
      return custom[k - 1];
  }
  throw std::invalid_argument("Schedule: unknown kind");
}

void SaTarget::validate() const {
  if (alpha.empty()) throw std::invalid_argument("SaTarget: empty target");
  if (!all_finite(alpha)) throw std::invalid_argument("SaTarget: target must be finite");
}

namespace {

void append_trace(SaState& state) {
  if (!state.record_trace) return;
  state.trace.push_back(
      {state.k, state.x_hat, std::sqrt(squared_distance(state.x_hat, state.target.alpha))});
}

}  // namespace

void sa_step(SaState& state, const Vec& observation, double a_k) {
  const Vec& alpha = state.target.alpha;
  if (state.x_hat.size() != alpha.size())
    throw std::invalid_argument("sa_step: iterate/target dimension mismatch");
  if (observation.size() != alpha.size())
    throw std::invalid_argument("sa_step: observation dimension mismatch");
  if (!all_finite(observation))
    throw NumericError("sa_step: non-finite observation at k = " + std::to_string(state.k));

  for (std::size_t i = 0; i < alpha.size(); ++i)
    state.x_hat[i] += a_k * (alpha[i] - observation[i]);
  state.k += 1;
  if (!all_finite(state.x_hat))
    throw NumericError("sa_step: iterate diverged at k = " + std::to_string(state.k));
  append_trace(state);
}

void sa_step_averaged(SaState& state, const RestorationOracle& oracle, std::size_t m,
                      double a_k, Rng& rng) {
  if (m == 0) throw std::invalid_argument("sa_step_averaged: m must be >= 1");
  Vec mean(state.x_hat.size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    Vec draw = oracle(state.x_hat, rng);
    if (draw.size() != mean.size())
      throw std::invalid_argument("sa_step_averaged: oracle output dimension mismatch");
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += draw[j];
  }
  for (double& v : mean) v /= static_cast<double>(m);
  sa_step(state, mean, a_k);
}

SaResult sa_solve(const RestorationOracle& oracle, const SaTarget& target, const Vec& x0,
                  const Schedule& schedule, std::size_t n_steps, Rng& rng,
                  std::size_t averaging_m, bool record_trace) {
  target.validate();
  if (n_steps == 0) throw std::invalid_argument("sa_solve: n_steps must be >= 1");
  SaState state{0, x0, target, record_trace, {}};
  append_trace(state);
  for (std::size_t k = 1; k <= n_steps; ++k)
    sa_step_averaged(state, oracle, averaging_m, schedule.weight(k), rng);
  return SaResult{std::move(state.x_hat), std::move(state.trace)};
}

ScheduleDiagnostic validate_schedule_a1(const Schedule& schedule, std::size_t horizon) {
  if (horizon < 10) throw std::invalid_argument("validate_schedule_a1: horizon must be >= 10");
  double sum = 0.0, sq_sum = 0.0;
  double half_sum = 0.0, half_sq_sum = 0.0;
  std::size_t half = horizon / 2;
  for (std::size_t k = 1; k <= horizon; ++k) {
    double a = schedule.weight(k);
    sum += a;
    sq_sum += a * a;
    if (k == half) {
      half_sum = sum;
      half_sq_sum = sq_sum;
    }
  }

  ScheduleVerdict verdict;
  if (schedule.kind == ScheduleKind::Harmonic || schedule.kind == ScheduleKind::ScaledHarmonic) {
    verdict = ScheduleVerdict::Pass;
  } else {
    // second-half growth: the square sum must be settling, the plain sum
    // must still be growing
    double sq_tail = sq_sum - half_sq_sum;
    double sum_tail = sum - half_sum;
    if (sq_tail > 1e-3)
      verdict = ScheduleVerdict::Fail;
    else if (sum_tail < 1e-2)
      verdict = ScheduleVerdict::Fail;
    else
      verdict = ScheduleVerdict::Inconclusive;
  }
  return ScheduleDiagnostic{sum, sq_sum, verdict};
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("Box: lo/hi must be nonempty and the same length");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Box: need lo < hi per coordinate");
}

MonotonicityReport monotonicity_probe(const RestorationOracle& oracle, const Box& box,
                                      std::size_t grid_points, std::size_t n_draws, Rng& rng) {
  box.validate();
  std::size_t d = box.dim();
  if (d > 3) throw std::invalid_argument("monotonicity_probe: grid probe supports d <= 3 only");
  if (grid_points < 2) throw std::invalid_argument("monotonicity_probe: need >= 2 grid points");
  if (n_draws == 0) throw std::invalid_argument("monotonicity_probe: need >= 1 draw");

  // full grid, row-major over coordinates
  std::size_t n_nodes = 1;
  for (std::size_t i = 0; i < d; ++i) n_nodes *= grid_points;

  auto node_point = [&](std::size_t flat) {
    Vec p(d);
    for (std::size_t i = d; i-- > 0;) {
      std::size_t idx = flat % grid_points;
      flat /= grid_points;
      p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(idx) /
                             static_cast<double>(grid_points - 1);
    }
    return p;
  };

  std::vector<Vec> estimate(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    Vec p = node_point(n);
    Vec mean(d, 0.0);
    for (std::size_t r = 0; r < n_draws; ++r) {
      Vec draw = oracle(p, rng);
      for (std::size_t i = 0; i < d; ++i) mean[i] += draw[i];
    }
    for (double& v : mean) v /= static_cast<double>(n_draws);
    estimate[n] = std::move(mean);
  }

  MonotonicityReport report;
  report.violated_per_dim.assign(d, 0);
  // stride of axis i in the flat index
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t i = d; i-- > 1;) stride[i - 1] = stride[i] * grid_points;

  for (std::size_t axis = 0; axis < d; ++axis) {
    for (std::size_t n = 0; n < n_nodes; ++n) {
      std::size_t along = (n / stride[axis]) % grid_points;
      // all ordered pairs on the grid line through n along this axis
      for (std::size_t j = along + 1; j < grid_points; ++j) {
        std::size_t partner = n + (j - along) * stride[axis];
        report.pairs_checked += 1;
        if (estimate[n][axis] >= estimate[partner][axis]) {
          report.pairs_violated += 1;
          report.violated_per_dim[axis] += 1;
        }
      }
    }
  }
  return report;
}

double bounded_second_moment_probe(const RestorationOracle& oracle, const SaTarget& target,
                                   const std::vector<Vec>& points, std::size_t n_draws,
                                   Rng& rng) {
  target.validate();
  if (points.empty()) throw std::invalid_argument("bounded_second_moment_probe: no probe points");
  if (n_draws == 0) throw std::invalid_argument("bounded_second_moment_probe: need >= 1 draw");
  double worst = 0.0;
  for (const Vec& p : points) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n_draws; ++r)
      acc += squared_distance(oracle(p, rng), target.alpha);
    worst = std::max(worst, acc / static_cast<double>(n_draws));
  }
  return worst;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& trace) {
  CsvWriter csv(path);
  std::size_t d = trace.empty() ? 0 : trace.front().x.size();
  std::vector<std::string> header{"k"};
  for (std::size_t i = 1; i <= d; ++i) header.push_back("x_" + std::to_string(i));
  header.push_back("distance_to_target");
  csv.header(header);
  for (const TracePoint& tp : trace) {
    std::vector<std::string> row{std::to_string(tp.k)};
    for (double v : tp.x) row.push_back(format_double(v));
    row.push_back(format_double(tp.distance_to_target));
    csv.row(row);
  }
}

}  // namespace dkgm
