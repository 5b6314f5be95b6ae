#pragma once

#include <filesystem>
#include <vector>

#include "dkgm/nn.hpp"
#include "dkgm/rng.hpp"
#include "dkgm/sa.hpp"
#include "dkgm/synthdata.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

/// First-stage training knobs. noise_level doubles as the kernel bandwidth
/// of the density the denoiser is fit to.
struct Stage1Config {
  double noise_level = 0.5;
  std::size_t kde_samples_per_point = 1;
  std::size_t epochs = 50;
  std::size_t batch_size = 100;
  double learning_rate = 3e-4;

  void validate() const;
};

/// Truncated discrete Gaussian, radius = ceil(3b), taps renormalized so
/// they sum to 1 exactly; applied separably on image grids.
struct BlurKernel {
  double bandwidth;
  int radius;
  Vec taps;  // 2 * radius + 1 entries

  explicit BlurKernel(double b);
};

enum class LossTarget { CleanData, BlurredInput };
enum class VectorCorruption { Affine, AdditiveNoise };

struct Stage2Config {
  std::size_t n_steps = 4;
  Schedule schedule = Schedule::harmonic();
  double b_lo = 0.5;
  double b_hi = 1.0;
  LossTarget loss_target = LossTarget::CleanData;
  // gaussian blurring is undefined on point clouds; vector data is
  // corrupted by an affine map or additive noise instead
  VectorCorruption corruption = VectorCorruption::Affine;
  double corruption_scale = 0.1;
  Vec corruption_shift = {1.0, 1.0};
  double corruption_sigma = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 100;
  double learning_rate = 3e-4;

  void validate() const;
};

enum class DataKind { Vector, ImageGrid };

struct DkgmModel {
  TimeConditionedNet f_theta;  // stage 1, unconditioned
  TimeConditionedNet u_gamma;  // stage 2, time-conditioned
  DataKind data_kind = DataKind::Vector;

  void validate() const;
};

/// sum over draws of ||x - f(x + alpha * eps_k)||^2
double stage1_loss(const TimeConditionedNet& f_theta, const Vec& x,
                   const std::vector<Vec>& noise_draws, double noise_level);

struct LossCurve {
  std::vector<double> epoch_mean;
};

LossCurve train_stage1(const std::vector<Vec>& data, const Stage1Config& cfg,
                       TimeConditionedNet& net, Rng& rng);

/// Separable Gaussian blur with reflect padding at the borders.
ImageGrid gaussian_blur(const ImageGrid& image, double b);

struct Stage2Trajectory {
  std::vector<Vec> iterates;  // x_hat_0 .. x_hat_n
  const Vec& final_iterate() const { return iterates.back(); }
};

/// Debiasing recursion with an explicit anchor:
///   x_hat_t = x_hat_{t-1} + a_t * u(anchor - x_hat_{t-1}, t).
Stage2Trajectory debias_recursion(const TimeConditionedNet& u_gamma, Vec x_hat0,
                                  const Vec& anchor, std::size_t n, const Schedule& schedule);

/// Second-stage forward pass: x_hat_0 = u(x_input, 0), then the recursion
/// anchored at x_hat_0. n = 0 returns x_hat_0 alone.
Stage2Trajectory stage2_forward(const TimeConditionedNet& u_gamma, const Vec& x_input,
                                std::size_t n, const Schedule& schedule);

/// ||target - x_hat_n||^2 where x_hat_n comes from stage2_forward on the
/// corrupted input; the target is the clean datum by default or the
/// corrupted input itself in the literal-objective mode.
double stage2_loss(const TimeConditionedNet& u_gamma, const Vec& x_clean, const Vec& x_bar_g,
                   const Stage2Config& cfg);

/// Gradient of stage2_loss w.r.t. the network parameters, backpropagated
/// through the full unrolled recursion (the anchor being itself a network
/// output included).
Vec stage2_loss_grad(const TimeConditionedNet& u_gamma, const Vec& x_clean, const Vec& x_bar_g,
                     const Stage2Config& cfg);

/// Vector-data training: corrupts each point per cfg.corruption.
LossCurve train_stage2(const std::vector<Vec>& data, const Stage2Config& cfg,
                       TimeConditionedNet& net, Rng& rng);

/// Image-data training: per batch draws b ~ Unif[b_lo, b_hi] and blurs the
/// batch with it (the draw is skipped when b_lo == b_hi).
LossCurve train_stage2(const std::vector<ImageGrid>& data, const Stage2Config& cfg,
                       TimeConditionedNet& net, Rng& rng);

/// End-to-end sampling: x_kde = f_theta(x + alpha * eps), then the stage-2
/// recursion anchored at x_kde.
Vec dkgm_sample(const DkgmModel& model, const Vec& x, double alpha, std::size_t n,
                const Schedule& schedule, Rng& rng);

/// CSV columns: epoch, mean_loss.
void write_loss_curve_csv(const std::filesystem::path& path, const LossCurve& curve);

Vec flatten(const ImageGrid& image);
ImageGrid unflatten(const Vec& pixels, std::size_t height, std::size_t width);

}  // namespace dkgm
