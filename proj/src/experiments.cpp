#include "dkgm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dkgm/checkpoint.hpp"
#include "dkgm/csv.hpp"
#include "dkgm/errors.hpp"
#include "dkgm/kde.hpp"

namespace dkgm {

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

/// Tracks every file the experiment writes so the manifest can list them
/// all, sorted by name, with content hashes.
class ArtifactDir {
 public:
  explicit ArtifactDir(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path file(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }

  std::vector<ManifestEntry> write_manifest() {
    std::sort(names_.begin(), names_.end());
    std::vector<ManifestEntry> entries;
    for (const std::string& name : names_) {
      std::ifstream in(dir_ / name, std::ios::binary);
      if (!in) throw std::runtime_error("manifest: cannot reopen " + name);
      std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      entries.push_back({name, bytes.size(),
                         hex64(fnv1a64(reinterpret_cast<const unsigned char*>(bytes.data()),
                                       bytes.size()))});
    }
    CsvWriter csv(dir_ / "manifest.csv");
    csv.header({"file", "bytes", "fnv1a64"});
    for (const ManifestEntry& e : entries)
      csv.row({e.file, std::to_string(e.bytes), e.hash});
    return entries;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

MlpSpec vector_net_spec(std::size_t data_width, const std::vector<std::size_t>& hidden,
                        bool skip, std::size_t time_embed_dim) {
  MlpSpec spec;
  spec.layer_widths.push_back(data_width);
  for (std::size_t w : hidden) spec.layer_widths.push_back(w);
  spec.layer_widths.push_back(data_width);
  spec.activation = Activation::Tanh;
  spec.skip_connection = skip;
  spec.time_embed_dim = time_embed_dim;
  spec.validate();
  return spec;
}

Stage1Config stage1_config(const Stage1Section& s) {
  Stage1Config cfg;
  cfg.noise_level = s.noise_level;
  cfg.kde_samples_per_point = s.kde_samples_per_point;
  cfg.epochs = s.epochs;
  cfg.batch_size = s.batch_size;
  cfg.learning_rate = s.learning_rate;
  cfg.validate();
  return cfg;
}

Stage2Config stage2_config(const RunConfig& run_cfg) {
  const Stage2Section& s = run_cfg.stage2;
  Stage2Config cfg;
  cfg.n_steps = s.n_steps;
  cfg.schedule = run_cfg.schedule.build();
  cfg.b_lo = s.b_lo;
  cfg.b_hi = s.b_hi;
  cfg.loss_target = s.loss_target;
  cfg.corruption = s.corruption;
  cfg.corruption_scale = run_cfg.spiral.affine_scale;
  cfg.corruption_shift = {run_cfg.spiral.affine_shift_x, run_cfg.spiral.affine_shift_y};
  cfg.corruption_sigma = s.corruption_sigma;
  cfg.epochs = s.epochs;
  cfg.batch_size = s.batch_size;
  cfg.learning_rate = s.learning_rate;
  cfg.validate();
  return cfg;
}

SpiralParams spiral_params(const SpiralSection& s) {
  SpiralParams p;
  p.angle_scale = s.angle_scale;
  p.latent_rate = s.latent_rate;
  p.affine_scale = s.affine_scale;
  p.affine_shift = {s.affine_shift_x, s.affine_shift_y};
  p.validate();
  return p;
}

double mean_pairwise_distance(const std::vector<Vec>& samples) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      total += std::sqrt(squared_distance(samples[i], samples[j]));
      pairs += 1;
    }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

struct SwissRollState {
  SwissRollRun result;
  SwissRoll train_data;
  std::vector<Vec> clean_eval;
  std::vector<Vec> corrupted_eval;
  std::vector<std::vector<Vec>> reconstructions;  // [eval step][point]
  std::vector<std::vector<Vec>> samples;          // [alpha][sample]
  TimeConditionedNet f_theta;
  TimeConditionedNet u_gamma;
};

SwissRollState swissroll_state(const RunConfig& cfg) {
  SpiralParams params = spiral_params(cfg.spiral);
  Stage2Config s2 = stage2_config(cfg);
  Schedule schedule = cfg.schedule.build();

  Rng data_rng = make_stream(cfg.seed, streams::kData);
  SwissRollState st;
  st.train_data = swiss_roll(cfg.spiral.n_points, params, data_rng);

  // stage 2: debiasing net trained on corrupted -> clean pairs
  Rng u_init = make_stream(cfg.seed, streams::kStage2Init);
  st.u_gamma = TimeConditionedNet::glorot(
      vector_net_spec(2, cfg.stage2.hidden_widths, cfg.stage2.skip_connection,
                      cfg.stage2.time_embed_dim),
      u_init);
  Rng u_train = make_stream(cfg.seed, streams::kStage2Train);
  st.result.stage2_curve = train_stage2(st.train_data.points, s2, st.u_gamma, u_train);

  // stage 1: denoiser
  Rng f_init = make_stream(cfg.seed, streams::kStage1Init);
  st.f_theta = TimeConditionedNet::glorot(
      vector_net_spec(2, cfg.stage1.hidden_widths, cfg.stage1.skip_connection, 0), f_init);
  Rng f_train = make_stream(cfg.seed, streams::kStage1Train);
  st.result.stage1_curve = train_stage1(st.train_data.points, stage1_config(cfg.stage1),
                                        st.f_theta, f_train);

  // held-out reconstruction sweep over the debiasing step counts
  Rng eval_rng = make_stream(cfg.seed, streams::kEval);
  SwissRoll eval = swiss_roll(cfg.spiral.n_eval, params, eval_rng);
  st.clean_eval = eval.points;
  if (s2.corruption == VectorCorruption::Affine) {
    st.corrupted_eval = affine_transform(eval.points, params.affine_scale, params.affine_shift);
  } else {
    st.corrupted_eval.reserve(eval.points.size());
    for (const Vec& p : eval.points) {
      Vec q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        q[i] = p[i] + s2.corruption_sigma * eval_rng.normal();
      st.corrupted_eval.push_back(std::move(q));
    }
  }

  st.result.eval_steps = cfg.stage2.eval_steps;
  for (std::size_t k : st.result.eval_steps) {
    std::vector<Vec> outputs;
    outputs.reserve(st.corrupted_eval.size());
    for (const Vec& x : st.corrupted_eval)
      outputs.push_back(stage2_forward(st.u_gamma, x, k, schedule).final_iterate());
    ManifoldDistance dist = manifold_distance(outputs, params);
    st.result.eval_distances.push_back(dist.mean);
    st.result.resolution_bound = dist.resolution_bound;
    st.reconstructions.push_back(std::move(outputs));
  }

  // sample diversity from one seed datum at each configured noise level
  Rng sampling = make_stream(cfg.seed, streams::kSampling);
  DkgmModel model{st.f_theta, st.u_gamma, DataKind::Vector};
  Vec seed_datum = spiral_point(1.0, params);
  st.result.sample_alphas = cfg.stage1.sample_alphas;
  for (double alpha : st.result.sample_alphas) {
    std::vector<Vec> draws;
    draws.reserve(cfg.stage1.n_samples);
    for (std::size_t i = 0; i < cfg.stage1.n_samples; ++i)
      draws.push_back(dkgm_sample(model, seed_datum, alpha, s2.n_steps, schedule, sampling));
    st.result.diversity.push_back(mean_pairwise_distance(draws));
    st.samples.push_back(std::move(draws));
  }
  return st;
}

struct ShapesState {
  ShapesRun result;
  std::vector<ImageGrid> clean_eval;
  std::vector<ImageGrid> blurred_eval;
  std::vector<ImageGrid> debiased_eval;
  TimeConditionedNet u_gamma;
};

ShapesState shapes_state(const RunConfig& cfg) {
  Stage2Config s2 = stage2_config(cfg);
  Schedule schedule = cfg.schedule.build();
  std::size_t side = cfg.shapes.side;

  Rng data_rng = make_stream(cfg.seed, streams::kData);
  std::vector<ImageGrid> corpus = shapes_corpus(cfg.shapes.n_images, side, data_rng);

  ShapesState st;
  st.result.blur_levels = cfg.shapes.blur_levels;
  for (double b : cfg.shapes.blur_levels) {
    std::vector<double> per_image;
    per_image.reserve(corpus.size());
    for (const ImageGrid& im : corpus) per_image.push_back(sharpness(gaussian_blur(im, b)));
    st.result.sharpness_by_image.push_back(std::move(per_image));
  }

  Rng u_init = make_stream(cfg.seed, streams::kStage2Init);
  st.u_gamma = TimeConditionedNet::glorot(
      vector_net_spec(side * side, cfg.stage2.hidden_widths, cfg.stage2.skip_connection,
                      cfg.stage2.time_embed_dim),
      u_init);
  Rng u_train = make_stream(cfg.seed, streams::kStage2Train);
  st.result.stage2_curve = train_stage2(corpus, s2, st.u_gamma, u_train);

  Rng eval_rng = make_stream(cfg.seed, streams::kEval);
  st.clean_eval = shapes_corpus(cfg.shapes.n_eval, side, eval_rng);
  std::vector<Vec> clean_flat, blurred_flat, debiased_flat;
  for (const ImageGrid& im : st.clean_eval) {
    double b = s2.b_hi > s2.b_lo ? eval_rng.uniform(s2.b_lo, s2.b_hi) : s2.b_lo;
    ImageGrid blurred = gaussian_blur(im, b);
    Vec out = stage2_forward(st.u_gamma, flatten(blurred), s2.n_steps, schedule).final_iterate();
    st.debiased_eval.push_back(unflatten(out, side, side));
    clean_flat.push_back(flatten(im));
    blurred_flat.push_back(flatten(blurred));
    debiased_flat.push_back(std::move(out));
    st.blurred_eval.push_back(std::move(blurred));
  }

  st.result.sharpness_clean = sharpness(st.clean_eval);
  st.result.sharpness_blurred = sharpness(st.blurred_eval);
  st.result.sharpness_debiased = sharpness(st.debiased_eval);
  st.result.energy_blurred_vs_clean = energy_distance(blurred_flat, clean_flat);
  st.result.energy_debiased_vs_clean = energy_distance(debiased_flat, clean_flat);
  return st;
}

}  // namespace

SwissRollRun run_swissroll_core(const RunConfig& cfg) { return swissroll_state(cfg).result; }

ShapesRun run_shapes_core(const RunConfig& cfg) { return shapes_state(cfg).result; }

SaDemoRun run_sa_demo_core(const RunConfig& cfg) {
  const SaSection& s = cfg.sa;
  Schedule schedule = cfg.schedule.build();
  if (s.slope == 0.0) throw std::invalid_argument("sa-demo: slope must be nonzero");

  RestorationOracle oracle = [&s](const Vec& x, Rng& r) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = s.slope * x[i] + s.noise_sigma * r.normal();
    return y;
  };
  SaTarget target{{s.target}};
  Vec x0{s.x0};

  SaDemoRun out;
  out.root = s.target / s.slope;
  out.step_budgets = s.step_budgets;
  std::uint64_t sa_master = stream_seed(cfg.seed, streams::kSa);

  for (std::size_t bi = 0; bi < s.step_budgets.size(); ++bi) {
    std::size_t budget = s.step_budgets[bi];
    std::size_t hits = 0;
    double total_distance = 0.0;
    for (std::size_t run_idx = 0; run_idx < s.n_runs; ++run_idx) {
      Rng rng = make_stream(sa_master, bi * s.n_runs + run_idx);
      bool want_trace = bi + 1 == s.step_budgets.size() && run_idx == 0;
      SaResult res = sa_solve(oracle, target, x0, schedule, budget, rng, s.averaging_m,
                              want_trace);
      if (want_trace) out.trace = std::move(res.trace);
      double distance = std::abs(res.x_hat[0] - out.root);
      total_distance += distance;
      if (distance < s.epsilon) hits += 1;
    }
    out.fraction_within.push_back(static_cast<double>(hits) / static_cast<double>(s.n_runs));
    out.mean_final_distance.push_back(total_distance / static_cast<double>(s.n_runs));
  }
  out.schedule_check = validate_schedule_a1(schedule, s.schedule_check_horizon);
  return out;
}

SdePolicyRun run_sde_policy_core(const RunConfig& cfg) {
  SdeParams p{cfg.sde.a, cfg.sde.sigma, cfg.sde.eta, cfg.sde.x0, cfg.sde.start};
  p.validate();

  SdePolicyRun out;
  if (p.a > 0.0) out.t_star = phase_change_point(p);
  Policy optimal = p.a > 0.0 ? Policy::optimal(p) : Policy::constant(1.0);

  Rng rng = make_stream(cfg.seed, streams::kSde);
  out.optimal = simulate_sde(p, optimal, cfg.sde.horizon, cfg.sde.dt, cfg.sde.n_paths, rng,
                             cfg.sde.sample_stride);
  out.constant = simulate_sde(p, Policy::constant(1.0), cfg.sde.horizon, cfg.sde.dt,
                              cfg.sde.n_paths, rng, 0);
  return out;
}

std::vector<MetricRow> run_metrics_report_core(const RunConfig& cfg) {
  const MetricsSection& s = cfg.metrics;
  Rng data_rng = make_stream(cfg.seed, streams::kData);
  std::vector<ImageGrid> corpus = shapes_corpus(s.n_images, s.side, data_rng);

  auto sharpness_row = [&](const std::string& name, const std::vector<ImageGrid>& images) {
    double mean = sharpness(images);
    double var = 0.0;
    for (const ImageGrid& im : images) {
      double d = sharpness(im) - mean;
      var += d * d;
    }
    var /= static_cast<double>(images.size() - 1);
    return MetricRow{name, mean, std::sqrt(var / static_cast<double>(images.size())),
                     images.size()};
  };

  std::vector<MetricRow> rows;
  rows.push_back(sharpness_row("sharpness_clean", corpus));

  std::vector<Vec> clean_flat;
  for (const ImageGrid& im : corpus) clean_flat.push_back(flatten(im));
  for (double b : s.blur_levels) {
    std::vector<ImageGrid> blurred;
    std::vector<Vec> blurred_flat;
    for (const ImageGrid& im : corpus) {
      blurred.push_back(gaussian_blur(im, b));
      blurred_flat.push_back(flatten(blurred.back()));
    }
    rows.push_back(sharpness_row("sharpness_blur_" + format_double(b), blurred));
    rows.push_back(MetricRow{"energy_distance_blur_" + format_double(b),
                             energy_distance(blurred_flat, clean_flat), 0.0, corpus.size()});
  }

  // restoration-bias probes at the first corpus image
  Rng eval_rng = make_stream(cfg.seed, streams::kEval);
  Vec probe = flatten(corpus.front());
  RestorationOracle shifted = [&s](const Vec& x, Rng&) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s.restorer_shift;
    return y;
  };
  RestorationOracle noisy = [&s](const Vec& x, Rng& r) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s.restorer_shift * r.normal();
    return y;
  };
  BiasEstimate shift_bias = empirical_bias(shifted, probe, s.bias_trials, eval_rng);
  BiasEstimate noise_bias = empirical_bias(noisy, probe, s.bias_trials, eval_rng);
  rows.push_back(MetricRow{"bias_norm_shift_restorer", norm(shift_bias.bias),
                           norm(shift_bias.std_error), s.bias_trials});
  rows.push_back(MetricRow{"bias_norm_noisy_restorer", norm(noise_bias.bias),
                           norm(noise_bias.std_error), s.bias_trials});
  return rows;
}

namespace {

void emit_swissroll(const RunConfig& cfg, ArtifactDir& dir) {
  SwissRollState st = swissroll_state(cfg);

  write_points_csv(dir.file("ground_truth.csv"), st.train_data.points, st.train_data.latents);
  write_points_csv(dir.file("transformed.csv"), st.corrupted_eval);
  for (std::size_t i = 0; i < st.result.eval_steps.size(); ++i)
    write_points_csv(
        dir.file("reconstructions_k" + std::to_string(st.result.eval_steps[i]) + ".csv"),
        st.reconstructions[i]);

  {
    CsvWriter csv(dir.file("distances.csv"));
    csv.header({"k", "mean_distance", "resolution_bound"});
    for (std::size_t i = 0; i < st.result.eval_steps.size(); ++i)
      csv.row({std::to_string(st.result.eval_steps[i]),
               format_double(st.result.eval_distances[i]),
               format_double(st.result.resolution_bound)});
  }
  {
    CsvWriter csv(dir.file("diversity.csv"));
    csv.header({"alpha", "mean_pairwise_distance", "n_samples"});
    for (std::size_t i = 0; i < st.result.sample_alphas.size(); ++i)
      csv.row({format_double(st.result.sample_alphas[i]), format_double(st.result.diversity[i]),
               std::to_string(cfg.stage1.n_samples)});
  }
  for (std::size_t i = 0; i < st.result.sample_alphas.size(); ++i)
    write_points_csv(
        dir.file("samples_alpha" + format_double(st.result.sample_alphas[i]) + ".csv"),
        st.samples[i]);

  write_loss_curve_csv(dir.file("stage1_loss.csv"), st.result.stage1_curve);
  write_loss_curve_csv(dir.file("stage2_loss.csv"), st.result.stage2_curve);

  ModelMeta meta1{1, cfg.stage1.noise_level, 0, 0.0, 0.0};
  save_stage_checkpoint(dir.file("f_theta.dkgm"), st.f_theta, meta1);
  ModelMeta meta2{2, cfg.stage1.noise_level, cfg.stage2.n_steps, cfg.stage2.b_lo,
                  cfg.stage2.b_hi};
  save_stage_checkpoint(dir.file("u_gamma.dkgm"), st.u_gamma, meta2);
}

void emit_shapes(const RunConfig& cfg, ArtifactDir& dir) {
  ShapesState st = shapes_state(cfg);

  {
    CsvWriter csv(dir.file("blur_sharpness.csv"));
    csv.header({"b", "mean_sharpness"});
    for (std::size_t i = 0; i < st.result.blur_levels.size(); ++i) {
      double mean = 0.0;
      for (double v : st.result.sharpness_by_image[i]) mean += v;
      mean /= static_cast<double>(st.result.sharpness_by_image[i].size());
      csv.row({format_double(st.result.blur_levels[i]), format_double(mean)});
    }
  }
  {
    CsvWriter csv(dir.file("sharpness_by_image.csv"));
    csv.header({"image", "b", "sharpness"});
    for (std::size_t i = 0; i < st.result.blur_levels.size(); ++i)
      for (std::size_t j = 0; j < st.result.sharpness_by_image[i].size(); ++j)
        csv.row({std::to_string(j), format_double(st.result.blur_levels[i]),
                 format_double(st.result.sharpness_by_image[i][j])});
  }
  {
    CsvWriter csv(dir.file("enhancement.csv"));
    csv.header({"metric", "value"});
    csv.row({"sharpness_clean", format_double(st.result.sharpness_clean)});
    csv.row({"sharpness_blurred", format_double(st.result.sharpness_blurred)});
    csv.row({"sharpness_debiased", format_double(st.result.sharpness_debiased)});
    csv.row({"energy_blurred_vs_clean", format_double(st.result.energy_blurred_vs_clean)});
    csv.row({"energy_debiased_vs_clean", format_double(st.result.energy_debiased_vs_clean)});
  }
  write_loss_curve_csv(dir.file("stage2_loss.csv"), st.result.stage2_curve);

  std::size_t n_pgm = std::min<std::size_t>(4, st.clean_eval.size());
  for (std::size_t i = 0; i < n_pgm; ++i) {
    write_pgm(dir.file("clean_" + std::to_string(i) + ".pgm"), st.clean_eval[i]);
    write_pgm(dir.file("blurred_" + std::to_string(i) + ".pgm"), st.blurred_eval[i]);
    write_pgm(dir.file("debiased_" + std::to_string(i) + ".pgm"), st.debiased_eval[i]);
  }

  ModelMeta meta{2, cfg.stage1.noise_level, cfg.stage2.n_steps, cfg.stage2.b_lo, cfg.stage2.b_hi};
  save_stage_checkpoint(dir.file("u_gamma.dkgm"), st.u_gamma, meta);
}

void emit_sa_demo(const RunConfig& cfg, ArtifactDir& dir) {
  SaDemoRun out = run_sa_demo_core(cfg);
  {
    CsvWriter csv(dir.file("convergence.csv"));
    csv.header({"n_steps", "fraction_within_epsilon", "mean_final_distance", "epsilon", "root"});
    for (std::size_t i = 0; i < out.step_budgets.size(); ++i)
      csv.row({std::to_string(out.step_budgets[i]), format_double(out.fraction_within[i]),
               format_double(out.mean_final_distance[i]), format_double(cfg.sa.epsilon),
               format_double(out.root)});
  }
  write_trace_csv(dir.file("trace.csv"), out.trace);
  {
    CsvWriter csv(dir.file("schedule_check.csv"));
    csv.header({"horizon", "partial_sum", "partial_square_sum", "verdict"});
    const char* verdict = out.schedule_check.verdict == ScheduleVerdict::Pass ? "pass"
                          : out.schedule_check.verdict == ScheduleVerdict::Fail ? "fail"
                                                                                : "inconclusive";
    csv.row({std::to_string(cfg.sa.schedule_check_horizon),
             format_double(out.schedule_check.partial_sum),
             format_double(out.schedule_check.partial_square_sum), verdict});
  }
}

void emit_sde_policy(const RunConfig& cfg, ArtifactDir& dir) {
  SdePolicyRun out = run_sde_policy_core(cfg);
  SdeParams p{cfg.sde.a, cfg.sde.sigma, cfg.sde.eta, cfg.sde.x0, cfg.sde.start};

  {
    CsvWriter csv(dir.file("policy.csv"));
    std::string t_star = out.t_star ? format_double(*out.t_star) : "none";
    csv.raw_line("t_star=" + t_star + ",a=" + format_double(p.a) +
                 ",eta=" + format_double(p.eta) + ",sigma=" + format_double(p.sigma) +
                 ",m0=" + format_double(p.m0()));
    csv.header({"t", "u_optimal", "u_constant"});
    Policy optimal = p.a > 0.0 ? Policy::optimal(p) : Policy::constant(1.0);
    const std::size_t n_grid = 200;
    for (std::size_t i = 0; i <= n_grid; ++i) {
      double t = cfg.sde.horizon * static_cast<double>(i) / static_cast<double>(n_grid);
      csv.row({format_double(t), format_double(optimal(t)), format_double(1.0)});
    }
  }
  {
    CsvWriter csv(dir.file("cost.csv"));
    csv.header({"policy", "m_T", "std_error", "n_paths", "n_steps", "dt_effective"});
    csv.row({"optimal", format_double(out.optimal.m_T), format_double(out.optimal.std_error),
             std::to_string(cfg.sde.n_paths), std::to_string(out.optimal.n_steps),
             format_double(out.optimal.dt_effective)});
    csv.row({"constant_1", format_double(out.constant.m_T),
             format_double(out.constant.std_error), std::to_string(cfg.sde.n_paths),
             std::to_string(out.constant.n_steps), format_double(out.constant.dt_effective)});
  }
  if (cfg.sde.sample_stride > 0) write_paths_csv(dir.file("paths.csv"), out.optimal.samples);
}

void emit_metrics_report(const RunConfig& cfg, ArtifactDir& dir) {
  write_metric_report_csv(dir.file("report.csv"), run_metrics_report_core(cfg));
}

}  // namespace

RunOutcome run(const RunConfig& cfg, bool quiet) {
  cfg.validate();
  ArtifactDir dir(cfg.output_dir);
  if (!quiet)
    std::cout << "[" << experiment_name(cfg.experiment) << "] seed " << cfg.seed << " -> "
              << cfg.output_dir << "\n";
  switch (cfg.experiment) {
    case ExperimentKind::SwissRoll: emit_swissroll(cfg, dir); break;
    case ExperimentKind::Shapes: emit_shapes(cfg, dir); break;
    case ExperimentKind::SaDemo: emit_sa_demo(cfg, dir); break;
    case ExperimentKind::SdePolicy: emit_sde_policy(cfg, dir); break;
    case ExperimentKind::MetricsReport: emit_metrics_report(cfg, dir); break;
  }
  RunOutcome outcome{dir.write_manifest()};
  if (!quiet) std::cout << "wrote " << outcome.manifest.size() + 1 << " files\n";
  return outcome;
}

std::string seed_report(const RunConfig& cfg) {
  static const char* names[streams::kCount] = {
      "data",        "stage1_init", "stage1_train", "stage2_init", "stage2_train",
      "eval",        "sampling",    "sde",          "sa"};
  std::ostringstream out;
  out << "master seed: " << cfg.seed << "\n";
  out << "stream seeds (splitmix64 finalizer of master + (i+1)*0x9E3779B97F4A7C15):\n";
  for (std::uint64_t i = 0; i < streams::kCount; ++i)
    out << "  " << i << "  " << names[i] << "  " << stream_seed(cfg.seed, i) << "\n";
  return out.str();
}

}  // namespace dkgm
