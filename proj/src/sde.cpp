#include "dkgm/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dkgm/csv.hpp"
#include "dkgm/errors.hpp"

namespace dkgm {

void SdeParams::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("SdeParams: eta must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("SdeParams: sigma must be nonnegative");
  if (!std::isfinite(a) || !std::isfinite(x0) || !std::isfinite(start))
    throw std::invalid_argument("SdeParams: parameters must be finite");
}

std::optional<double> phase_change_point(const SdeParams& p) {
  p.validate();
  if (p.a <= 0.0) return std::nullopt;
  if (!(p.sigma > 0.0))
    throw std::domain_error("phase_change_point: needs sigma > 0 when a > 0");
  double ratio = 4.0 * p.m0() / (p.eta * p.sigma);
  // log(ratio - 1): reject the nonpositive domain and the band just above
  // it where the cancellation in ratio - 1 has destroyed the value
  if (ratio <= 1.0 + 1e-12)
    throw std::domain_error("phase_change_point: 4*m0/(eta*sigma) must exceed 1");
  return std::log(ratio - 1.0) / (2.0 * p.a);
}

double optimal_policy(const SdeParams& p, double t) {
  if (t < 0.0) throw std::invalid_argument("optimal_policy: t must be nonnegative");
  if (p.a <= 0.0) return 1.0;
  double t_star = *phase_change_point(p);
  if (t <= t_star) return 1.0;
  return 1.0 / (1.0 + p.a * (t - t_star));
}

Policy Policy::constant(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("Policy: constant u must be in [0, 1]");
  Policy p;
  p.kind = Kind::Constant;
  p.constant_u = u;
  return p;
}

Policy Policy::optimal(const SdeParams& params) {
  if (params.a > 0.0) (void)phase_change_point(params);  // validate the domain up front
  Policy p;
  p.kind = Kind::Optimal;
  p.params = params;
  return p;
}

Policy Policy::inverse_time() {
  Policy p;
  p.kind = Kind::InverseTime;
  return p;
}

double Policy::operator()(double t) const {
  switch (kind) {
    case Kind::Constant:
      return constant_u;
    case Kind::Optimal:
      return optimal_policy(params, t);
    case Kind::InverseTime:
      return 1.0 / (1.0 + t);
  }
  throw std::invalid_argument("Policy: unknown kind");
}

SdeResult simulate_sde(const SdeParams& p, const Policy& policy, double T, double dt,
                       std::size_t n_paths, Rng& rng, std::size_t sample_stride) {
  p.validate();
  if (!(T > 0.0)) throw std::invalid_argument("simulate_sde: horizon must be positive");
  if (!(dt > 0.0 && dt <= T / 10.0))
    throw std::invalid_argument("simulate_sde: need 0 < dt <= T/10");
  if (n_paths == 0) throw std::invalid_argument("simulate_sde: need at least one path");

  auto n_steps = static_cast<std::size_t>(std::llround(T / dt));
  double dt_eff = T / static_cast<double>(n_steps);
  double noise_scale = std::sqrt(p.eta * p.sigma * dt_eff);
  std::uint64_t master = rng.next_u64();

  SdeResult result;
  result.n_steps = n_steps;
  result.dt_effective = dt_eff;

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t path = 0; path < n_paths; ++path) {
    Rng stream = make_stream(master, path);
    double x = p.start;
    for (std::size_t k = 0; k < n_steps; ++k) {
      double t = static_cast<double>(k) * dt_eff;
      double u = policy(t);
      if (sample_stride > 0 && k % sample_stride == 0)
        result.samples.push_back({path, t, x, u});
      x += u * (p.x0 - p.a * x) * dt_eff + u * noise_scale * stream.normal();
      if (!std::isfinite(x))
        throw NumericError("simulate_sde: non-finite value on path " + std::to_string(path) +
                           " at step " + std::to_string(k + 1));
    }
    if (sample_stride > 0) result.samples.push_back({path, T, x, policy(T)});
    double cost = 0.5 * (x - p.x0) * (x - p.x0);
    sum += cost;
    sum_sq += cost * cost;
  }

  double n = static_cast<double>(n_paths);
  result.m_T = sum / n;
  double var = n > 1.0 ? (sum_sq - sum * sum / n) / (n - 1.0) : 0.0;
  result.std_error = n > 1.0 ? std::sqrt(std::max(var, 0.0) / n) : 0.0;
  return result;
}

void write_paths_csv(const std::filesystem::path& path,
                     const std::vector<SdePathSample>& samples) {
  CsvWriter csv(path);
  csv.header({"path_id", "t", "x_t", "u_t"});
  for (const SdePathSample& s : samples)
    csv.row({std::to_string(s.path_id), format_double(s.t), format_double(s.x),
             format_double(s.u)});
}

}  // namespace dkgm
