#include "dkgm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dkgm/csv.hpp"
#include "dkgm/errors.hpp"

namespace dkgm {

void Stage1Config::validate() const {
  if (!(noise_level > 0.0)) throw std::invalid_argument("Stage1Config: noise_level must be positive");
  if (kde_samples_per_point == 0)
    throw std::invalid_argument("Stage1Config: kde_samples_per_point must be >= 1");
  if (epochs == 0 || batch_size == 0)
    throw std::invalid_argument("Stage1Config: epochs and batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("Stage1Config: learning_rate must be positive");
}

void Stage2Config::validate() const {
  if (n_steps == 0) throw std::invalid_argument("Stage2Config: n_steps must be >= 1");
  if (!(b_lo > 0.0 && b_lo <= b_hi))
    throw std::invalid_argument("Stage2Config: need 0 < b_lo <= b_hi");
  if (epochs == 0 || batch_size == 0)
    throw std::invalid_argument("Stage2Config: epochs and batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("Stage2Config: learning_rate must be positive");
  if (corruption == VectorCorruption::AdditiveNoise && !(corruption_sigma > 0.0))
    throw std::invalid_argument("Stage2Config: corruption_sigma must be positive");
}

void DkgmModel::validate() const {
  f_theta.spec.validate();
  u_gamma.spec.validate();
  if (f_theta.spec.input_width() != f_theta.spec.output_width() ||
      u_gamma.spec.input_width() != u_gamma.spec.output_width() ||
      f_theta.spec.input_width() != u_gamma.spec.input_width())
    throw std::invalid_argument("DkgmModel: both nets must share the flattened data width");
}

double stage1_loss(const TimeConditionedNet& f_theta, const Vec& x,
                   const std::vector<Vec>& noise_draws, double noise_level) {
  if (noise_draws.empty()) throw std::invalid_argument("stage1_loss: need at least one draw");
  double loss = 0.0;
  Vec perturbed(x.size());
  for (const Vec& eps : noise_draws) {
    if (eps.size() != x.size()) throw std::invalid_argument("stage1_loss: noise shape mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) perturbed[i] = x[i] + noise_level * eps[i];
    NetEval eval = net_forward_cached(f_theta, perturbed, 0);
    loss += squared_distance(x, eval.output);
  }
  return loss;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  return idx;
}

void check_loss_finite(double loss, const char* where) {
  if (!std::isfinite(loss)) throw NumericError(std::string(where) + ": non-finite loss");
}

}  // namespace

LossCurve train_stage1(const std::vector<Vec>& data, const Stage1Config& cfg,
                       TimeConditionedNet& net, Rng& rng) {
  cfg.validate();
  net.spec.validate();
  if (data.empty()) throw std::invalid_argument("train_stage1: empty data");
  std::size_t width = net.spec.input_width();
  for (const Vec& x : data)
    if (x.size() != width) throw std::invalid_argument("train_stage1: datum width mismatch");

  AdamState adam = AdamState::for_params(net.params.size(), cfg.learning_rate);
  LossCurve curve;
  Vec batch_grad(net.params.size());
  Vec perturbed(width);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order = shuffled_indices(data.size(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      std::size_t end = std::min(begin + cfg.batch_size, order.size());
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t bi = begin; bi < end; ++bi) {
        const Vec& x = data[order[bi]];
        for (std::size_t draw = 0; draw < cfg.kde_samples_per_point; ++draw) {
          for (std::size_t i = 0; i < width; ++i)
            perturbed[i] = x[i] + cfg.noise_level * rng.normal();
          NetEval eval = net_forward_cached(net, perturbed, 0);
          Vec upstream(width);
          double loss = 0.0;
          for (std::size_t i = 0; i < width; ++i) {
            double diff = eval.output[i] - x[i];
            upstream[i] = 2.0 * diff;
            loss += diff * diff;
          }
          epoch_loss += loss;
          NetGradients g = net_backward_cached(net, eval, upstream);
          for (std::size_t i = 0; i < batch_grad.size(); ++i) batch_grad[i] += g.param_grad[i];
        }
      }
      double scale = 1.0 / static_cast<double>(end - begin);
      for (double& g : batch_grad) g *= scale;
      adam_step(adam, net.params, batch_grad);
    }
    double mean_loss = epoch_loss / static_cast<double>(data.size());
    check_loss_finite(mean_loss, "train_stage1");
    curve.epoch_mean.push_back(mean_loss);
  }
  return curve;
}

BlurKernel::BlurKernel(double b) : bandwidth(b) {
  if (!(b > 0.0)) throw std::invalid_argument("BlurKernel: bandwidth must be positive");
  radius = static_cast<int>(std::ceil(3.0 * b));
  taps.resize(2 * static_cast<std::size_t>(radius) + 1);
  double inv_2b2 = 1.0 / (2.0 * b * b);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-static_cast<double>(i) * static_cast<double>(i) * inv_2b2);
    taps[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  // absorb the rounding residue into the final tap: the prefix sum is in
  // [1/2, 2], so 1 - prefix is exact and the left-to-right total is
  // exactly 1
  double prefix = 0.0;
  for (std::size_t i = 0; i + 1 < taps.size(); ++i) prefix += taps[i];
  taps.back() = 1.0 - prefix;
}

namespace {

// reflect (mirror including the edge sample): -1 -> 0, n -> n-1
std::size_t reflect_index(long i, std::size_t n) {
  long size = static_cast<long>(n);
  while (i < 0 || i >= size) {
    if (i < 0) i = -i - 1;
    if (i >= size) i = 2 * size - i - 1;
  }
  return static_cast<std::size_t>(i);
}

// 1-d pass written around the center sample; constant inputs are exact
// fixed points because every difference term vanishes
void blur_line(const double* src, double* dst, std::size_t n, long stride,
               const BlurKernel& kernel) {
  for (std::size_t i = 0; i < n; ++i) {
    double center = src[static_cast<long>(i) * stride];
    double acc = 0.0;
    for (int k = -kernel.radius; k <= kernel.radius; ++k) {
      std::size_t j = reflect_index(static_cast<long>(i) + k, n);
      acc += kernel.taps[static_cast<std::size_t>(k + kernel.radius)] *
             (src[static_cast<long>(j) * stride] - center);
    }
    dst[static_cast<long>(i) * stride] = center + acc;
  }
}

}  // namespace

ImageGrid gaussian_blur(const ImageGrid& image, double b) {
  if (image.height == 0 || image.width == 0)
    throw std::invalid_argument("gaussian_blur: empty image");
  BlurKernel kernel(b);

  ImageGrid horizontal(image.height, image.width);
  for (std::size_t r = 0; r < image.height; ++r)
    blur_line(image.pixels.data() + r * image.width,
              horizontal.pixels.data() + r * image.width, image.width, 1, kernel);

  ImageGrid out(image.height, image.width);
  for (std::size_t c = 0; c < image.width; ++c)
    blur_line(horizontal.pixels.data() + c, out.pixels.data() + c, image.height,
              static_cast<long>(image.width), kernel);
  return out;
}

Stage2Trajectory debias_recursion(const TimeConditionedNet& u_gamma, Vec x_hat0,
                                  const Vec& anchor, std::size_t n, const Schedule& schedule) {
  Stage2Trajectory traj;
  traj.iterates.reserve(n + 1);
  traj.iterates.push_back(std::move(x_hat0));
  Vec diff(anchor.size());
  for (std::size_t t = 1; t <= n; ++t) {
    const Vec& prev = traj.iterates.back();
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = anchor[i] - prev[i];
    NetEval eval = net_forward_cached(u_gamma, diff, static_cast<long>(t));
    double a_t = schedule.weight(t);
    Vec next(prev.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = prev[i] + a_t * eval.output[i];
    if (!all_finite(next))
      throw NumericError("debias_recursion: non-finite iterate at step " + std::to_string(t));
    traj.iterates.push_back(std::move(next));
  }
  return traj;
}

Stage2Trajectory stage2_forward(const TimeConditionedNet& u_gamma, const Vec& x_input,
                                std::size_t n, const Schedule& schedule) {
  NetEval eval0 = net_forward_cached(u_gamma, x_input, 0);
  if (!all_finite(eval0.output)) throw NumericError("stage2_forward: non-finite x_hat_0");
  Vec anchor = eval0.output;
  return debias_recursion(u_gamma, std::move(eval0.output), anchor, n, schedule);
}

namespace {

struct UnrolledBackprop {
  double loss;
  Vec param_grad;
};

// Loss and parameter gradient of ||target - x_hat_n||^2 through the full
// unrolled recursion of stage2_forward on the corrupted input.
UnrolledBackprop stage2_unrolled(const TimeConditionedNet& net, const Vec& x_corrupt,
                                 const Vec& loss_target, std::size_t n,
                                 const Schedule& schedule) {
  NetEval eval0 = net_forward_cached(net, x_corrupt, 0);
  const Vec anchor = eval0.output;  // recursion anchor x_hat_0

  std::vector<NetEval> evals(n);
  std::vector<Vec> iterates(n + 1);
  iterates[0] = anchor;
  Vec diff(anchor.size());
  for (std::size_t t = 1; t <= n; ++t) {
    const Vec& prev = iterates[t - 1];
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = anchor[i] - prev[i];
    evals[t - 1] = net_forward_cached(net, diff, static_cast<long>(t));
    double a_t = schedule.weight(t);
    Vec next(prev.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = prev[i] + a_t * evals[t - 1].output[i];
    iterates[t] = std::move(next);
  }

  UnrolledBackprop out;
  out.loss = squared_distance(loss_target, iterates[n]);
  out.param_grad.assign(net.params.size(), 0.0);

  Vec g(anchor.size());  // d loss / d x_hat_t, walking t downwards
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (iterates[n][i] - loss_target[i]);
  Vec anchor_grad(anchor.size(), 0.0);
  Vec upstream(anchor.size());
  for (std::size_t t = n; t >= 1; --t) {
    double a_t = schedule.weight(t);
    for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] = a_t * g[i];
    NetGradients step = net_backward_cached(net, evals[t - 1], upstream);
    for (std::size_t i = 0; i < out.param_grad.size(); ++i)
      out.param_grad[i] += step.param_grad[i];
    for (std::size_t i = 0; i < g.size(); ++i) {
      anchor_grad[i] += step.input_grad[i];
      g[i] -= step.input_grad[i];
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += anchor_grad[i];
  NetGradients first = net_backward_cached(net, eval0, g);
  for (std::size_t i = 0; i < out.param_grad.size(); ++i) out.param_grad[i] += first.param_grad[i];
  return out;
}

const Vec& pick_loss_target(const Stage2Config& cfg, const Vec& clean, const Vec& corrupted) {
  return cfg.loss_target == LossTarget::CleanData ? clean : corrupted;
}

}  // namespace

double stage2_loss(const TimeConditionedNet& u_gamma, const Vec& x_clean, const Vec& x_bar_g,
                   const Stage2Config& cfg) {
  cfg.validate();
  if (x_clean.size() != x_bar_g.size())
    throw std::invalid_argument("stage2_loss: clean/corrupted shape mismatch");
  Stage2Trajectory traj = stage2_forward(u_gamma, x_bar_g, cfg.n_steps, cfg.schedule);
  return squared_distance(pick_loss_target(cfg, x_clean, x_bar_g), traj.final_iterate());
}

Vec stage2_loss_grad(const TimeConditionedNet& u_gamma, const Vec& x_clean, const Vec& x_bar_g,
                     const Stage2Config& cfg) {
  cfg.validate();
  if (x_clean.size() != x_bar_g.size())
    throw std::invalid_argument("stage2_loss_grad: clean/corrupted shape mismatch");
  return stage2_unrolled(u_gamma, x_bar_g, pick_loss_target(cfg, x_clean, x_bar_g), cfg.n_steps,
                         cfg.schedule)
      .param_grad;
}

namespace {

LossCurve train_stage2_impl(const std::vector<Vec>& clean,
                            const std::function<Vec(const Vec&, Rng&)>& corrupt_batch_item,
                            const std::function<void(Rng&)>& on_batch, const Stage2Config& cfg,
                            TimeConditionedNet& net, Rng& rng) {
  AdamState adam = AdamState::for_params(net.params.size(), cfg.learning_rate);
  LossCurve curve;
  Vec batch_grad(net.params.size());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order = shuffled_indices(clean.size(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      std::size_t end = std::min(begin + cfg.batch_size, order.size());
      on_batch(rng);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t bi = begin; bi < end; ++bi) {
        const Vec& x = clean[order[bi]];
        Vec corrupted = corrupt_batch_item(x, rng);
        UnrolledBackprop bp = stage2_unrolled(net, corrupted,
                                              pick_loss_target(cfg, x, corrupted), cfg.n_steps,
                                              cfg.schedule);
        epoch_loss += bp.loss;
        for (std::size_t i = 0; i < batch_grad.size(); ++i) batch_grad[i] += bp.param_grad[i];
      }
      double scale = 1.0 / static_cast<double>(end - begin);
      for (double& g : batch_grad) g *= scale;
      adam_step(adam, net.params, batch_grad);
    }
    double mean_loss = epoch_loss / static_cast<double>(clean.size());
    check_loss_finite(mean_loss, "train_stage2");
    curve.epoch_mean.push_back(mean_loss);
  }
  return curve;
}

}  // namespace

LossCurve train_stage2(const std::vector<Vec>& data, const Stage2Config& cfg,
                       TimeConditionedNet& net, Rng& rng) {
  cfg.validate();
  net.spec.validate();
  if (data.empty()) throw std::invalid_argument("train_stage2: empty data");
  std::size_t width = net.spec.input_width();
  for (const Vec& x : data)
    if (x.size() != width) throw std::invalid_argument("train_stage2: datum width mismatch");

  auto corrupt = [&cfg](const Vec& x, Rng& r) {
    Vec out(x.size());
    if (cfg.corruption == VectorCorruption::Affine) {
      if (cfg.corruption_shift.size() != x.size())
        throw std::invalid_argument("train_stage2: corruption_shift width mismatch");
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = cfg.corruption_scale * x[i] + cfg.corruption_shift[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + cfg.corruption_sigma * r.normal();
    }
    return out;
  };
  return train_stage2_impl(data, corrupt, [](Rng&) {}, cfg, net, rng);
}

LossCurve train_stage2(const std::vector<ImageGrid>& data, const Stage2Config& cfg,
                       TimeConditionedNet& net, Rng& rng) {
  cfg.validate();
  net.spec.validate();
  if (data.empty()) throw std::invalid_argument("train_stage2: empty data");
  std::size_t width = net.spec.input_width();
  std::vector<Vec> clean;
  clean.reserve(data.size());
  for (const ImageGrid& im : data) {
    if (im.height * im.width != width)
      throw std::invalid_argument("train_stage2: image size does not match net width");
    clean.push_back(flatten(im));
  }

  std::size_t height = data.front().height;
  std::size_t img_width = data.front().width;
  double batch_b = cfg.b_lo;
  auto draw_b = [&cfg, &batch_b](Rng& r) {
    if (cfg.b_hi > cfg.b_lo) batch_b = r.uniform(cfg.b_lo, cfg.b_hi);
  };
  auto corrupt = [&batch_b, height, img_width](const Vec& x, Rng&) {
    return flatten(gaussian_blur(unflatten(x, height, img_width), batch_b));
  };
  return train_stage2_impl(clean, corrupt, draw_b, cfg, net, rng);
}

Vec dkgm_sample(const DkgmModel& model, const Vec& x, double alpha, std::size_t n,
                const Schedule& schedule, Rng& rng) {
  model.validate();
  if (x.size() != model.f_theta.spec.input_width())
    throw std::invalid_argument("dkgm_sample: datum width mismatch");
  if (alpha < 0.0) throw std::invalid_argument("dkgm_sample: noise level must be nonnegative");

  Vec perturbed(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) perturbed[i] = x[i] + alpha * rng.normal();
  NetEval kde_eval = net_forward_cached(model.f_theta, perturbed, 0);
  const Vec& x_kde = kde_eval.output;

  NetEval eval0 = net_forward_cached(model.u_gamma, x_kde, 0);
  Stage2Trajectory traj =
      debias_recursion(model.u_gamma, std::move(eval0.output), x_kde, n, schedule);
  return traj.iterates.back();
}

void write_loss_curve_csv(const std::filesystem::path& path, const LossCurve& curve) {
  CsvWriter csv(path);
  csv.header({"epoch", "mean_loss"});
  for (std::size_t e = 0; e < curve.epoch_mean.size(); ++e)
    csv.row({std::to_string(e + 1), format_double(curve.epoch_mean[e])});
}

Vec flatten(const ImageGrid& image) { return image.pixels; }

ImageGrid unflatten(const Vec& pixels, std::size_t height, std::size_t width) {
  if (pixels.size() != height * width)
    throw std::invalid_argument("unflatten: pixel count does not match dims");
  ImageGrid out(height, width);
  out.pixels = pixels;
  return out;
}

}  // namespace dkgm
