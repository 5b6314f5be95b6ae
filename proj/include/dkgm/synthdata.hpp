#pragma once

#include <filesystem>
#include <vector>

#include "dkgm/rng.hpp"
#include "dkgm/tensor.hpp"

namespace dkgm {

/// Thin-spiral manifold: latent u ~ Exp(latent_rate), embedded through
/// g(u) = (angle_scale * sqrt(u) / 3) * (cos(angle_scale sqrt(u)),
/// sin(angle_scale sqrt(u))). The affine fields describe the corrupted
/// variant scale * g(u) + shift.
struct SpiralParams {
  double angle_scale = 4.0 * 3.14159265358979323846 / 3.0;
  double latent_rate = 1.0;
  double affine_scale = 0.1;
  Vec affine_shift = {1.0, 1.0};

  void validate() const;
};

/// Point on the spiral for a given latent value.
Vec spiral_point(double u, const SpiralParams& params);

struct SwissRoll {
  std::vector<Vec> points;  // 2-vectors
  Vec latents;
};

SwissRoll swiss_roll(std::size_t n, const SpiralParams& params, Rng& rng);

std::vector<Vec> affine_transform(const std::vector<Vec>& points, double scale,
                                  const Vec& shift);

/// Grayscale image with pixel values in [0, 1] after generation.
struct ImageGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  Vec pixels;  // row-major, height * width

  ImageGrid() = default;
  ImageGrid(std::size_t h, std::size_t w, double fill = 0.0)
      : height(h), width(w), pixels(h * w, fill) {}

  double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
  double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
};

/// Random axis-aligned rectangles and discs, 1-4 per image, foreground 1.0
/// on background 0.0. Every shape is kept at least two pixels inside the
/// border so each image has edges away from the frame.
std::vector<ImageGrid> shapes_corpus(std::size_t n, std::size_t side, Rng& rng);

struct ManifoldDistance {
  double mean;             // mean over points of the distance to the nearest grid point
  double resolution_bound; // max spacing between adjacent spiral grid points
};

/// Brute-force distance to the spiral: 10^4 candidate points g(u) for u on
/// a uniform grid over [0, 8] (beyond 99.96% of the Exp(1) mass).
ManifoldDistance manifold_distance(const std::vector<Vec>& points, const SpiralParams& params);

/// CSV columns: x, y, u. Latents may be empty, in which case u is omitted.
void write_points_csv(const std::filesystem::path& path, const std::vector<Vec>& points,
                      const Vec& latents = {});

/// Binary 8-bit PGM, maxval 255, pixel = round(clamp(value, 0, 1) * 255).
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);

}  // namespace dkgm
