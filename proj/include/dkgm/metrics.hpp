#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dkgm/sa.hpp"
#include "dkgm/synthdata.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

/// Variance of the 3x3 Laplace-filter activations, valid region only (no
/// padding), so images must be at least 3x3. Larger means sharper.
double sharpness(const ImageGrid& image);

/// Mean of the per-image sharpness over the list.
double sharpness(const std::vector<ImageGrid>& images);

struct BiasEstimate {
  Vec bias;       // x - mean of n_trials restorations
  Vec std_error;  // per-coordinate standard error of that mean
};

BiasEstimate empirical_bias(const RestorationOracle& restorer, const Vec& x,
                            std::size_t n_trials, Rng& rng);

/// 2 E||A-B|| - E||A-A'|| - E||B-B'|| with all-pairs (V-statistic) means.
double energy_distance(const std::vector<Vec>& sample_a, const std::vector<Vec>& sample_b);

struct MetricRow {
  std::string metric;
  double value;
  double stderr_value;
  std::size_t n;
};

/// CSV columns: metric, value, stderr, n.
void write_metric_report_csv(const std::filesystem::path& path,
                             const std::vector<MetricRow>& rows);

}  // namespace dkgm
