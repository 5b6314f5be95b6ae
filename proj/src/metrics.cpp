#include "dkgm/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "dkgm/csv.hpp"

namespace dkgm {

double sharpness(const ImageGrid& image) {
  if (image.height < 3 || image.width < 3)
    throw std::invalid_argument("sharpness: image must be at least 3x3");
  // stencil [[0,1,0],[1,-4,1],[0,1,0]] over the interior
  std::size_t rows = image.height - 2;
  std::size_t cols = image.width - 2;
  double n = static_cast<double>(rows * cols);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 1; r + 1 < image.height; ++r) {
    for (std::size_t c = 1; c + 1 < image.width; ++c) {
      double a = image.at(r - 1, c) + image.at(r + 1, c) + image.at(r, c - 1) +
                 image.at(r, c + 1) - 4.0 * image.at(r, c);
      sum += a;
      sum_sq += a * a;
    }
  }
  double mean = sum / n;
  return std::max(sum_sq / n - mean * mean, 0.0);
}

double sharpness(const std::vector<ImageGrid>& images) {
  if (images.empty()) throw std::invalid_argument("sharpness: empty image list");
  double total = 0.0;
  for (const ImageGrid& im : images) total += sharpness(im);
  return total / static_cast<double>(images.size());
}

BiasEstimate empirical_bias(const RestorationOracle& restorer, const Vec& x,
                            std::size_t n_trials, Rng& rng) {
  if (n_trials < 2) throw std::invalid_argument("empirical_bias: need n_trials >= 2");
  std::size_t d = x.size();
  // accumulate restorations centered at x; an identity restorer then gives
  // an exactly zero bias
  Vec sum(d, 0.0), sum_sq(d, 0.0);
  for (std::size_t k = 0; k < n_trials; ++k) {
    Vec draw = restorer(x, rng);
    if (draw.size() != d) throw std::invalid_argument("empirical_bias: restorer dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      double delta = draw[i] - x[i];
      sum[i] += delta;
      sum_sq[i] += delta * delta;
    }
  }
  double n = static_cast<double>(n_trials);
  BiasEstimate est;
  est.bias.resize(d);
  est.std_error.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    est.bias[i] = -(sum[i] / n);
    double var = (sum_sq[i] - sum[i] * sum[i] / n) / (n - 1.0);
    est.std_error[i] = std::sqrt(std::max(var, 0.0) / n);
  }
  return est;
}

double energy_distance(const std::vector<Vec>& sample_a, const std::vector<Vec>& sample_b) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("energy_distance: both samples must be nonempty");
  std::size_t d = sample_a.front().size();
  for (const Vec& v : sample_a)
    if (v.size() != d) throw std::invalid_argument("energy_distance: dimension mismatch");
  for (const Vec& v : sample_b)
    if (v.size() != d) throw std::invalid_argument("energy_distance: dimension mismatch");

  auto mean_cross = [](const std::vector<Vec>& u, const std::vector<Vec>& v) {
    double s = 0.0;
    for (const Vec& a : u)
      for (const Vec& b : v) s += std::sqrt(squared_distance(a, b));
    return s / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
  };

  return 2.0 * mean_cross(sample_a, sample_b) - mean_cross(sample_a, sample_a) -
         mean_cross(sample_b, sample_b);
}

void write_metric_report_csv(const std::filesystem::path& path,
                             const std::vector<MetricRow>& rows) {
  CsvWriter csv(path);
  csv.header({"metric", "value", "stderr", "n"});
  for (const MetricRow& r : rows)
    csv.row({r.metric, format_double(r.value), format_double(r.stderr_value),
             std::to_string(r.n)});
}

}  // namespace dkgm
