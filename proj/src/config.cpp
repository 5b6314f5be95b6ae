#include "dkgm/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "dkgm/csv.hpp"
#include "dkgm/errors.hpp"

namespace dkgm {

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SwissRoll: return "swissroll";
    case ExperimentKind::Shapes: return "shapes";
    case ExperimentKind::SaDemo: return "sa-demo";
    case ExperimentKind::SdePolicy: return "sde-policy";
    case ExperimentKind::MetricsReport: return "metrics-report";
  }
  return "?";
}

Schedule ScheduleSection::build() const {
  switch (kind) {
    case ScheduleKind::Harmonic: return Schedule::harmonic();
    case ScheduleKind::ScaledHarmonic: return Schedule::scaled_harmonic(scale);
    case ScheduleKind::Custom: break;
  }
  throw ParseError("schedule.kind: custom schedules are built in code, not config", 0);
}

namespace {

struct Cursor {
  std::size_t line = 0;
};

[[noreturn]] void fail(const Cursor& at, const std::string& what) {
  throw ParseError(what, at.line);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const Cursor& at, const std::string& key, const std::string& v) {
  const char* begin = v.data();
  const char* end = begin + v.size();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) fail(at, key + ": malformed real value '" + v + "'");
  if (!std::isfinite(out)) fail(at, key + ": value must be finite");
  return out;
}

std::uint64_t parse_u64(const Cursor& at, const std::string& key, const std::string& v) {
  const char* begin = v.data();
  const char* end = begin + v.size();
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) fail(at, key + ": malformed integer value '" + v + "'");
  return out;
}

std::size_t parse_size(const Cursor& at, const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_u64(at, key, v));
}

bool parse_bool(const Cursor& at, const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(at, key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_double_list(const Cursor& at, const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_double(at, key, p));
  return out;
}

std::vector<std::size_t> parse_size_list(const Cursor& at, const std::string& key,
                                         const std::string& v) {
  std::vector<std::size_t> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_size(at, key, p));
  return out;
}

void require(const Cursor& at, bool ok, const std::string& invariant) {
  if (!ok) fail(at, invariant);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool experiment_set = false;
  std::string section;
  Cursor at;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    at.line += 1;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(at, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"spiral", "shapes", "stage1", "stage2",
                                    "schedule", "sde", "sa", "metrics"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) fail(at, "unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(at, "expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(at, "empty key");
    std::string qual = section.empty() ? key : section + "." + key;

    if (section.empty()) {
      if (key == "experiment") {
        if (value == "swissroll") cfg.experiment = ExperimentKind::SwissRoll;
        else if (value == "shapes") cfg.experiment = ExperimentKind::Shapes;
        else if (value == "sa-demo") cfg.experiment = ExperimentKind::SaDemo;
        else if (value == "sde-policy") cfg.experiment = ExperimentKind::SdePolicy;
        else if (value == "metrics-report") cfg.experiment = ExperimentKind::MetricsReport;
        else fail(at, "experiment: unknown kind '" + value + "'");
        experiment_set = true;
      } else if (key == "seed") {
        cfg.seed = parse_u64(at, qual, value);
      } else if (key == "output_dir") {
        require(at, !value.empty(), "output_dir: must not be empty");
        cfg.output_dir = value;
      } else {
        fail(at, "unknown key '" + key + "'");
      }
    } else if (section == "spiral") {
      SpiralSection& s = cfg.spiral;
      if (key == "n_points") { s.n_points = parse_size(at, qual, value); require(at, s.n_points >= 1, qual + ": must be >= 1"); }
      else if (key == "n_eval") { s.n_eval = parse_size(at, qual, value); require(at, s.n_eval >= 1, qual + ": must be >= 1"); }
      else if (key == "angle_scale") { s.angle_scale = parse_double(at, qual, value); require(at, s.angle_scale > 0, qual + ": must be positive"); }
      else if (key == "latent_rate") { s.latent_rate = parse_double(at, qual, value); require(at, s.latent_rate > 0, qual + ": must be positive"); }
      else if (key == "affine_scale") { s.affine_scale = parse_double(at, qual, value); require(at, s.affine_scale != 0, qual + ": must be nonzero for invertibility"); }
      else if (key == "affine_shift_x") s.affine_shift_x = parse_double(at, qual, value);
      else if (key == "affine_shift_y") s.affine_shift_y = parse_double(at, qual, value);
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "shapes") {
      ShapesSection& s = cfg.shapes;
      if (key == "n_images") { s.n_images = parse_size(at, qual, value); require(at, s.n_images >= 1, qual + ": must be >= 1"); }
      else if (key == "n_eval") { s.n_eval = parse_size(at, qual, value); require(at, s.n_eval >= 1, qual + ": must be >= 1"); }
      else if (key == "side") { s.side = parse_size(at, qual, value); require(at, s.side >= 8, qual + ": must be >= 8"); }
      else if (key == "blur_levels") {
        s.blur_levels = parse_double_list(at, qual, value);
        for (double b : s.blur_levels) require(at, b > 0, qual + ": bandwidths must be positive");
      }
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "stage1") {
      Stage1Section& s = cfg.stage1;
      if (key == "noise_level") { s.noise_level = parse_double(at, qual, value); require(at, s.noise_level > 0, qual + ": must be positive"); }
      else if (key == "kde_samples_per_point") { s.kde_samples_per_point = parse_size(at, qual, value); require(at, s.kde_samples_per_point >= 1, qual + ": must be >= 1"); }
      else if (key == "epochs") { s.epochs = parse_size(at, qual, value); require(at, s.epochs >= 1, qual + ": must be >= 1"); }
      else if (key == "batch_size") { s.batch_size = parse_size(at, qual, value); require(at, s.batch_size >= 1, qual + ": must be >= 1"); }
      else if (key == "learning_rate") { s.learning_rate = parse_double(at, qual, value); require(at, s.learning_rate > 0, qual + ": must be positive"); }
      else if (key == "hidden_widths") {
        s.hidden_widths = parse_size_list(at, qual, value);
        for (std::size_t w : s.hidden_widths) require(at, w >= 1, qual + ": widths must be positive");
      }
      else if (key == "skip_connection") s.skip_connection = parse_bool(at, qual, value);
      else if (key == "sample_alphas") {
        s.sample_alphas = parse_double_list(at, qual, value);
        for (double a : s.sample_alphas) require(at, a >= 0, qual + ": noise levels must be nonnegative");
      }
      else if (key == "n_samples") { s.n_samples = parse_size(at, qual, value); require(at, s.n_samples >= 2, qual + ": must be >= 2"); }
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "stage2") {
      Stage2Section& s = cfg.stage2;
      if (key == "n_steps") { s.n_steps = parse_size(at, qual, value); require(at, s.n_steps >= 1, qual + ": must be >= 1"); }
      else if (key == "b_lo") { s.b_lo = parse_double(at, qual, value); require(at, s.b_lo > 0, qual + ": must be positive"); }
      else if (key == "b_hi") { s.b_hi = parse_double(at, qual, value); require(at, s.b_hi > 0, qual + ": must be positive"); }
      else if (key == "loss_target") {
        if (value == "clean_data") s.loss_target = LossTarget::CleanData;
        else if (value == "blurred_input") s.loss_target = LossTarget::BlurredInput;
        else fail(at, qual + ": expected clean_data or blurred_input");
      }
      else if (key == "corruption") {
        if (value == "affine") s.corruption = VectorCorruption::Affine;
        else if (value == "additive_noise") s.corruption = VectorCorruption::AdditiveNoise;
        else fail(at, qual + ": expected affine or additive_noise");
      }
      else if (key == "corruption_sigma") { s.corruption_sigma = parse_double(at, qual, value); require(at, s.corruption_sigma > 0, qual + ": must be positive"); }
      else if (key == "epochs") { s.epochs = parse_size(at, qual, value); require(at, s.epochs >= 1, qual + ": must be >= 1"); }
      else if (key == "batch_size") { s.batch_size = parse_size(at, qual, value); require(at, s.batch_size >= 1, qual + ": must be >= 1"); }
      else if (key == "learning_rate") { s.learning_rate = parse_double(at, qual, value); require(at, s.learning_rate > 0, qual + ": must be positive"); }
      else if (key == "hidden_widths") {
        s.hidden_widths = parse_size_list(at, qual, value);
        for (std::size_t w : s.hidden_widths) require(at, w >= 1, qual + ": widths must be positive");
      }
      else if (key == "time_embed_dim") { s.time_embed_dim = parse_size(at, qual, value); require(at, s.time_embed_dim % 2 == 0, qual + ": must be even"); }
      else if (key == "skip_connection") s.skip_connection = parse_bool(at, qual, value);
      else if (key == "eval_steps") s.eval_steps = parse_size_list(at, qual, value);
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "schedule") {
      ScheduleSection& s = cfg.schedule;
      if (key == "kind") {
        if (value == "harmonic") s.kind = ScheduleKind::Harmonic;
        else if (value == "scaled_harmonic") s.kind = ScheduleKind::ScaledHarmonic;
        else fail(at, qual + ": expected harmonic or scaled_harmonic");
      }
      else if (key == "scale") { s.scale = parse_double(at, qual, value); require(at, s.scale > 0, qual + ": must be positive"); }
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "sde") {
      SdeSection& s = cfg.sde;
      if (key == "a") s.a = parse_double(at, qual, value);
      else if (key == "sigma") { s.sigma = parse_double(at, qual, value); require(at, s.sigma >= 0, qual + ": must be nonnegative"); }
      else if (key == "eta") { s.eta = parse_double(at, qual, value); require(at, s.eta > 0, qual + ": must be positive"); }
      else if (key == "x0") s.x0 = parse_double(at, qual, value);
      else if (key == "start") s.start = parse_double(at, qual, value);
      else if (key == "horizon") { s.horizon = parse_double(at, qual, value); require(at, s.horizon > 0, qual + ": must be positive"); }
      else if (key == "dt") { s.dt = parse_double(at, qual, value); require(at, s.dt > 0, qual + ": must be positive"); }
      else if (key == "n_paths") { s.n_paths = parse_size(at, qual, value); require(at, s.n_paths >= 1, qual + ": must be >= 1"); }
      else if (key == "sample_stride") s.sample_stride = parse_size(at, qual, value);
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "sa") {
      SaSection& s = cfg.sa;
      if (key == "slope") s.slope = parse_double(at, qual, value);
      else if (key == "noise_sigma") { s.noise_sigma = parse_double(at, qual, value); require(at, s.noise_sigma >= 0, qual + ": must be nonnegative"); }
      else if (key == "target") s.target = parse_double(at, qual, value);
      else if (key == "x0") s.x0 = parse_double(at, qual, value);
      else if (key == "averaging_m") { s.averaging_m = parse_size(at, qual, value); require(at, s.averaging_m >= 1, qual + ": must be >= 1"); }
      else if (key == "n_runs") { s.n_runs = parse_size(at, qual, value); require(at, s.n_runs >= 1, qual + ": must be >= 1"); }
      else if (key == "epsilon") { s.epsilon = parse_double(at, qual, value); require(at, s.epsilon > 0, qual + ": must be positive"); }
      else if (key == "step_budgets") {
        s.step_budgets = parse_size_list(at, qual, value);
        require(at, !s.step_budgets.empty(), qual + ": must not be empty");
        for (std::size_t b : s.step_budgets) require(at, b >= 1, qual + ": budgets must be >= 1");
      }
      else if (key == "schedule_check_horizon") { s.schedule_check_horizon = parse_size(at, qual, value); require(at, s.schedule_check_horizon >= 10, qual + ": must be >= 10"); }
      else fail(at, "unknown key '" + qual + "'");
    } else if (section == "metrics") {
      MetricsSection& s = cfg.metrics;
      if (key == "n_images") { s.n_images = parse_size(at, qual, value); require(at, s.n_images >= 2, qual + ": must be >= 2"); }
      else if (key == "side") { s.side = parse_size(at, qual, value); require(at, s.side >= 8, qual + ": must be >= 8"); }
      else if (key == "blur_levels") {
        s.blur_levels = parse_double_list(at, qual, value);
        for (double b : s.blur_levels) require(at, b > 0, qual + ": bandwidths must be positive");
      }
      else if (key == "restorer_shift") s.restorer_shift = parse_double(at, qual, value);
      else if (key == "bias_trials") { s.bias_trials = parse_size(at, qual, value); require(at, s.bias_trials >= 2, qual + ": must be >= 2"); }
      else fail(at, "unknown key '" + qual + "'");
    }
  }

  if (!experiment_set) throw ParseError("missing experiment", 0);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (!(stage2.b_lo <= stage2.b_hi))
    throw ParseError("stage2: need b_lo <= b_hi", 0);
  if (!(sde.dt <= sde.horizon / 10.0))
    throw ParseError("sde: need dt <= horizon/10", 0);
}

namespace {

std::string bool_name(bool b) { return b ? "true" : "false"; }

template <typename T, typename F>
std::string join(const std::vector<T>& v, F format) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  return join(v, [](double x) { return format_double(x); });
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  return join(v, [](std::size_t x) { return std::to_string(x); });
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "experiment = " << experiment_name(c.experiment) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "output_dir = " << c.output_dir << "\n";

  out << "\n[spiral]\n";
  out << "n_points = " << c.spiral.n_points << "\n";
  out << "n_eval = " << c.spiral.n_eval << "\n";
  out << "angle_scale = " << format_double(c.spiral.angle_scale) << "\n";
  out << "latent_rate = " << format_double(c.spiral.latent_rate) << "\n";
  out << "affine_scale = " << format_double(c.spiral.affine_scale) << "\n";
  out << "affine_shift_x = " << format_double(c.spiral.affine_shift_x) << "\n";
  out << "affine_shift_y = " << format_double(c.spiral.affine_shift_y) << "\n";

  out << "\n[shapes]\n";
  out << "n_images = " << c.shapes.n_images << "\n";
  out << "n_eval = " << c.shapes.n_eval << "\n";
  out << "side = " << c.shapes.side << "\n";
  out << "blur_levels = " << join_doubles(c.shapes.blur_levels) << "\n";

  out << "\n[stage1]\n";
  out << "noise_level = " << format_double(c.stage1.noise_level) << "\n";
  out << "kde_samples_per_point = " << c.stage1.kde_samples_per_point << "\n";
  out << "epochs = " << c.stage1.epochs << "\n";
  out << "batch_size = " << c.stage1.batch_size << "\n";
  out << "learning_rate = " << format_double(c.stage1.learning_rate) << "\n";
  out << "hidden_widths = " << join_sizes(c.stage1.hidden_widths) << "\n";
  out << "skip_connection = " << bool_name(c.stage1.skip_connection) << "\n";
  out << "sample_alphas = " << join_doubles(c.stage1.sample_alphas) << "\n";
  out << "n_samples = " << c.stage1.n_samples << "\n";

  out << "\n[stage2]\n";
  out << "n_steps = " << c.stage2.n_steps << "\n";
  out << "b_lo = " << format_double(c.stage2.b_lo) << "\n";
  out << "b_hi = " << format_double(c.stage2.b_hi) << "\n";
  out << "loss_target = "
      << (c.stage2.loss_target == LossTarget::CleanData ? "clean_data" : "blurred_input") << "\n";
  out << "corruption = "
      << (c.stage2.corruption == VectorCorruption::Affine ? "affine" : "additive_noise") << "\n";
  out << "corruption_sigma = " << format_double(c.stage2.corruption_sigma) << "\n";
  out << "epochs = " << c.stage2.epochs << "\n";
  out << "batch_size = " << c.stage2.batch_size << "\n";
  out << "learning_rate = " << format_double(c.stage2.learning_rate) << "\n";
  out << "hidden_widths = " << join_sizes(c.stage2.hidden_widths) << "\n";
  out << "time_embed_dim = " << c.stage2.time_embed_dim << "\n";
  out << "skip_connection = " << bool_name(c.stage2.skip_connection) << "\n";
  out << "eval_steps = " << join_sizes(c.stage2.eval_steps) << "\n";

  out << "\n[schedule]\n";
  out << "kind = " << (c.schedule.kind == ScheduleKind::Harmonic ? "harmonic" : "scaled_harmonic")
      << "\n";
  out << "scale = " << format_double(c.schedule.scale) << "\n";

  out << "\n[sde]\n";
  out << "a = " << format_double(c.sde.a) << "\n";
  out << "sigma = " << format_double(c.sde.sigma) << "\n";
  out << "eta = " << format_double(c.sde.eta) << "\n";
  out << "x0 = " << format_double(c.sde.x0) << "\n";
  out << "start = " << format_double(c.sde.start) << "\n";
  out << "horizon = " << format_double(c.sde.horizon) << "\n";
  out << "dt = " << format_double(c.sde.dt) << "\n";
  out << "n_paths = " << c.sde.n_paths << "\n";
  out << "sample_stride = " << c.sde.sample_stride << "\n";

  out << "\n[sa]\n";
  out << "slope = " << format_double(c.sa.slope) << "\n";
  out << "noise_sigma = " << format_double(c.sa.noise_sigma) << "\n";
  out << "target = " << format_double(c.sa.target) << "\n";
  out << "x0 = " << format_double(c.sa.x0) << "\n";
  out << "averaging_m = " << c.sa.averaging_m << "\n";
  out << "n_runs = " << c.sa.n_runs << "\n";
  out << "epsilon = " << format_double(c.sa.epsilon) << "\n";
  out << "step_budgets = " << join_sizes(c.sa.step_budgets) << "\n";
  out << "schedule_check_horizon = " << c.sa.schedule_check_horizon << "\n";

  out << "\n[metrics]\n";
  out << "n_images = " << c.metrics.n_images << "\n";
  out << "side = " << c.metrics.side << "\n";
  out << "blur_levels = " << join_doubles(c.metrics.blur_levels) << "\n";
  out << "restorer_shift = " << format_double(c.metrics.restorer_shift) << "\n";
  out << "bias_trials = " << c.metrics.bias_trials << "\n";
  return out.str();
}

}  // namespace dkgm
