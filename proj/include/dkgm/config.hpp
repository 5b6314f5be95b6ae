#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dkgm/pipeline.hpp"
#include "dkgm/sa.hpp"

namespace dkgm {

enum class ExperimentKind { SwissRoll, Shapes, SaDemo, SdePolicy, MetricsReport };

std::string experiment_name(ExperimentKind kind);

struct SpiralSection {
  std::size_t n_points = 2000;
  std::size_t n_eval = 1000;
  double angle_scale = 4.0 * 3.14159265358979323846 / 3.0;
  double latent_rate = 1.0;
  double affine_scale = 0.1;
  double affine_shift_x = 1.0;
  double affine_shift_y = 1.0;

  bool operator==(const SpiralSection&) const = default;
};

struct ShapesSection {
  std::size_t n_images = 128;
  std::size_t n_eval = 64;
  std::size_t side = 16;
  std::vector<double> blur_levels = {0.5, 0.6, 0.8, 1.0};

  bool operator==(const ShapesSection&) const = default;
};

struct Stage1Section {
  double noise_level = 0.5;
  std::size_t kde_samples_per_point = 1;
  std::size_t epochs = 50;
  std::size_t batch_size = 100;
  double learning_rate = 3e-4;
  std::vector<std::size_t> hidden_widths = {16, 16};
  bool skip_connection = true;
  std::vector<double> sample_alphas = {0.5, 1.0};
  std::size_t n_samples = 100;

  bool operator==(const Stage1Section&) const = default;
};

struct Stage2Section {
  std::size_t n_steps = 4;
  double b_lo = 0.5;
  double b_hi = 1.0;
  LossTarget loss_target = LossTarget::CleanData;
  VectorCorruption corruption = VectorCorruption::Affine;
  double corruption_sigma = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 100;
  double learning_rate = 3e-4;
  std::vector<std::size_t> hidden_widths = {16, 16};
  std::size_t time_embed_dim = 8;
  bool skip_connection = false;
  std::vector<std::size_t> eval_steps = {0, 1, 5, 10};

  bool operator==(const Stage2Section&) const = default;
};

struct ScheduleSection {
  ScheduleKind kind = ScheduleKind::Harmonic;
  double scale = 1.0;

  Schedule build() const;
  bool operator==(const ScheduleSection&) const = default;
};

struct SdeSection {
  double a = 1.0;
  double sigma = 1.0;
  double eta = 0.1;
  double x0 = 1.0;
  // default start puts the initial cost m0 at exactly 1
  double start = 1.0 - 1.4142135623730951;
  double horizon = 10.0;
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::size_t sample_stride = 0;

  bool operator==(const SdeSection&) const = default;
};

struct SaSection {
  double slope = 2.0;  // oracle mean H(x) = slope * x
  double noise_sigma = 0.1;
  double target = 1.0;
  double x0 = 0.0;
  std::size_t averaging_m = 1;
  std::size_t n_runs = 100;
  double epsilon = 0.05;
  std::vector<std::size_t> step_budgets = {100, 1000, 10000};
  std::size_t schedule_check_horizon = 1000000;

  bool operator==(const SaSection&) const = default;
};

struct MetricsSection {
  std::size_t n_images = 64;
  std::size_t side = 16;
  std::vector<double> blur_levels = {0.5, 0.6, 0.8, 1.0};
  double restorer_shift = 0.1;
  std::size_t bias_trials = 10000;

  bool operator==(const MetricsSection&) const = default;
};

/// Everything an experiment run needs; every field except the experiment
/// kind has a default. Unknown keys in the text form are a hard error.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::SwissRoll;
  std::uint64_t seed = 42;
  std::string output_dir = "out";

  SpiralSection spiral;
  ShapesSection shapes;
  Stage1Section stage1;
  Stage2Section stage2;
  ScheduleSection schedule;
  SdeSection sde;
  SaSection sa;
  MetricsSection metrics;

  bool operator==(const RunConfig&) const = default;

  void validate() const;  // throws ParseError citing the violated invariant
};

/// Parses the documented plain-text format: [section] headers, key = value
/// lines, # comments. Throws ParseError with a line number on unknown
/// keys, malformed values, or violated invariants.
RunConfig parse_config(const std::string& text);

/// Inverse of parse_config up to formatting; re-parsing yields an equal
/// config.
std::string serialize_config(const RunConfig& cfg);

}  // namespace dkgm
