#include "dkgm/kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dkgm {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)
}

void KdeModel::validate() const {
  if (points.empty()) throw std::invalid_argument("KdeModel: need at least one point");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("KdeModel: bandwidth must be positive");
  std::size_t d = points.front().size();
  if (d == 0) throw std::invalid_argument("KdeModel: points must be nonempty vectors");
  for (const Vec& p : points)
    if (p.size() != d) throw std::invalid_argument("KdeModel: points must share one dimension");
}

double kde_density(const KdeModel& model, const Vec& x) {
  model.validate();
  std::size_t d = model.dim();
  if (x.size() != d) throw std::invalid_argument("kde_density: query dimension mismatch");
  double b = model.bandwidth;
  double inv_2b2 = 1.0 / (2.0 * b * b);
  double sum = 0.0;
  for (const Vec& p : model.points) sum += std::exp(-squared_distance(x, p) * inv_2b2);
  double log_norm = -0.5 * static_cast<double>(d) * kLogTwoPi -
                    static_cast<double>(d) * std::log(b) -
                    std::log(static_cast<double>(model.points.size()));
  return sum * std::exp(log_norm);
}

Vec kde_sample(const KdeModel& model, Rng& rng) {
  model.validate();
  const Vec& center = model.points[rng.index(model.points.size())];
  Vec out(center.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = center[i] + model.bandwidth * rng.normal();
  return out;
}

LikelihoodBound likelihood_lower_bound(const Vec& x, const std::vector<Vec>& samples,
                                       double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("likelihood_lower_bound: empty samples");
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("likelihood_lower_bound: bandwidth must be positive");
  std::size_t d = x.size();
  for (const Vec& s : samples)
    if (s.size() != d)
      throw std::invalid_argument("likelihood_lower_bound: sample dimension mismatch");

  double m = static_cast<double>(samples.size());
  double log_norm = -std::log(m) - static_cast<double>(d) * std::log(bandwidth) -
                    0.5 * static_cast<double>(d) * kLogTwoPi;
  double inv_2b2 = 1.0 / (2.0 * bandwidth * bandwidth);

  // per-sample log terms; the density is their log-sum-exp
  Vec terms(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    terms[k] = log_norm - squared_distance(x, samples[k]) * inv_2b2;

  double bound = 0.0;
  double peak = terms.front();
  for (double t : terms) {
    bound += t;
    peak = std::max(peak, t);
  }
  double lse = 0.0;
  for (double t : terms) lse += std::exp(t - peak);
  return LikelihoodBound{bound, peak + std::log(lse)};
}

}  // namespace dkgm
