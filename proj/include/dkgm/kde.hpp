#pragma once

#include <vector>

#include "dkgm/rng.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

enum class Kernel { Gaussian };

/// Kernel density estimate built from m reference points and a single
/// scalar bandwidth. For d > 1 the kernel is the isotropic product
/// Gaussian and the mixture is normalized by m * bandwidth^d, so
/// kde_density is a true probability density in every dimension.
struct KdeModel {
  std::vector<Vec> points;
  double bandwidth = 1.0;
  Kernel kernel = Kernel::Gaussian;

  void validate() const;  // throws std::invalid_argument
  std::size_t dim() const { return points.front().size(); }
};

/// Mixture density at x; strictly positive for the Gaussian kernel.
double kde_density(const KdeModel& model, const Vec& x);

/// Two-step sampling: pick a reference point uniformly, then draw from the
/// Gaussian centered there with standard deviation equal to the bandwidth.
Vec kde_sample(const KdeModel& model, Rng& rng);

struct LikelihoodBound {
  double lower_bound;  // sum over samples of log[(1/(m b^d)) K((x - X_k)/b)]
  double log_density;  // log of the mixture density at x
};

/// Both sides of the empirical-likelihood inequality. The bound is below
/// log_density whenever every summand's argument is <= 1; callers assert
/// the inequality only on such inputs.
LikelihoodBound likelihood_lower_bound(const Vec& x, const std::vector<Vec>& samples,
                                       double bandwidth);

}  // namespace dkgm
