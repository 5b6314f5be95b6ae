#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dkgm/rng.hpp"

namespace dkgm {

/// Scalar diffusion dx_t = -u_t (a x_t - x0) dt + u_t sqrt(eta * sigma) dW_t.
/// The process starts at `start` and x0 is the datum the cost tracks;
/// keeping the two distinct is what gives the initial cost m0 a nonzero
/// value, so the phase-change formula has a meaningful argument.
struct SdeParams {
  double a = 1.0;      // drift slope, f(x) = a x
  double sigma = 1.0;  // constant variance coefficient
  double eta = 0.1;    // fixed step size
  double x0 = 1.0;     // target datum
  double start = 0.0;  // process initial value

  double m0() const { return 0.5 * (start - x0) * (start - x0); }
  void validate() const;  // throws std::invalid_argument
};

/// Time of the drift-to-fluctuation switch, (1/2a) log(4 m0/(eta sigma) - 1).
/// Returns nullopt when a <= 0 (the policy is identically 1). Throws
/// std::domain_error when the log argument is nonpositive, including the
/// near-boundary band 4 m0/(eta sigma) in (1, 1 + 1e-12].
std::optional<double> phase_change_point(const SdeParams& p);

/// 1 while a <= 0 or t <= t*; afterwards 1 / (1 + a (t - t*)).
double optimal_policy(const SdeParams& p, double t);

/// Learning-rate policy u_t evaluable at any t >= 0, always in [0, 1].
struct Policy {
  enum class Kind { Constant, Optimal, InverseTime };

  Kind kind = Kind::Constant;
  double constant_u = 1.0;
  SdeParams params;

  static Policy constant(double u);
  static Policy optimal(const SdeParams& p);
  static Policy inverse_time();  // u_t = 1 / (1 + t)

  double operator()(double t) const;
};

struct SdePathSample {
  std::size_t path_id;
  double t;
  double x;
  double u;
};

struct SdeResult {
  double m_T;               // 0.5 * mean of (x_T - x0)^2 over paths
  double std_error;         // Monte-Carlo standard error of m_T
  std::size_t n_steps;      // Euler steps per path
  double dt_effective;      // T / n_steps
  std::vector<SdePathSample> samples;
};

/// Euler-Maruyama over n_paths independent paths. Path i draws from its own
/// stream split off a master seed taken from rng, and paths are reduced in
/// index order, so a parallel run would reproduce the sequential result
/// exactly. sample_stride > 0 records every stride-th step of every path.
SdeResult simulate_sde(const SdeParams& p, const Policy& policy, double T, double dt,
                       std::size_t n_paths, Rng& rng, std::size_t sample_stride = 0);

/// CSV columns: path_id, t, x_t, u_t.
void write_paths_csv(const std::filesystem::path& path,
                     const std::vector<SdePathSample>& samples);

}  // namespace dkgm
