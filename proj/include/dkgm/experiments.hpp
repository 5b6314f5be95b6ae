#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dkgm/config.hpp"
#include "dkgm/metrics.hpp"
#include "dkgm/pipeline.hpp"
#include "dkgm/sde.hpp"

namespace dkgm {

/// Fixed stream indexes off the master seed; the RNG stream of purpose p is
/// make_stream(seed, p). See rng.hpp for the splitting rule.
namespace streams {
inline constexpr std::uint64_t kData = 0;
inline constexpr std::uint64_t kStage1Init = 1;
inline constexpr std::uint64_t kStage1Train = 2;
inline constexpr std::uint64_t kStage2Init = 3;
inline constexpr std::uint64_t kStage2Train = 4;
inline constexpr std::uint64_t kEval = 5;
inline constexpr std::uint64_t kSampling = 6;
inline constexpr std::uint64_t kSde = 7;
inline constexpr std::uint64_t kSa = 8;
inline constexpr std::uint64_t kCount = 9;
}  // namespace streams

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n);

struct ManifestEntry {
  std::string file;
  std::uint64_t bytes;
  std::string hash;  // fnv1a64, 16 hex digits
};

struct RunOutcome {
  std::vector<ManifestEntry> manifest;
};

/// In-process results of the swiss-roll experiment, shared between run()
/// and the acceptance suite.
struct SwissRollRun {
  std::vector<std::size_t> eval_steps;
  std::vector<double> eval_distances;   // one per eval step
  double resolution_bound = 0.0;
  std::vector<double> sample_alphas;
  std::vector<double> diversity;        // mean pairwise sample distance per alpha
  LossCurve stage1_curve;
  LossCurve stage2_curve;
};

struct ShapesRun {
  std::vector<double> blur_levels;
  std::vector<std::vector<double>> sharpness_by_image;  // [level][image]
  double sharpness_clean = 0.0;
  double sharpness_blurred = 0.0;
  double sharpness_debiased = 0.0;
  double energy_blurred_vs_clean = 0.0;
  double energy_debiased_vs_clean = 0.0;
  LossCurve stage2_curve;
};

struct SaDemoRun {
  double root = 0.0;  // closed-form root of the linear oracle
  std::vector<std::size_t> step_budgets;
  std::vector<double> fraction_within;
  std::vector<double> mean_final_distance;
  std::vector<TracePoint> trace;
  ScheduleDiagnostic schedule_check{0.0, 0.0, ScheduleVerdict::Inconclusive};
};

struct SdePolicyRun {
  std::optional<double> t_star;
  SdeResult optimal;
  SdeResult constant;
};

SwissRollRun run_swissroll_core(const RunConfig& cfg);
ShapesRun run_shapes_core(const RunConfig& cfg);
SaDemoRun run_sa_demo_core(const RunConfig& cfg);
SdePolicyRun run_sde_policy_core(const RunConfig& cfg);
std::vector<MetricRow> run_metrics_report_core(const RunConfig& cfg);

/// Executes the configured experiment, writes its artifacts under
/// cfg.output_dir, and finishes with a manifest.csv naming every emitted
/// file with its content hash. Identical (config, seed) produce identical
/// hashes.
RunOutcome run(const RunConfig& cfg, bool quiet = true);

/// Human-readable table of the master seed and derived stream seeds.
std::string seed_report(const RunConfig& cfg);

}  // namespace dkgm
