#include "dkgm/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "dkgm/csv.hpp"

namespace dkgm {

void SpiralParams::validate() const {
  if (!(angle_scale > 0.0)) throw std::invalid_argument("SpiralParams: angle_scale must be positive");
  if (!(latent_rate > 0.0)) throw std::invalid_argument("SpiralParams: latent_rate must be positive");
  if (affine_shift.size() != 2)
    throw std::invalid_argument("SpiralParams: affine_shift must be a 2-vector");
}

Vec spiral_point(double u, const SpiralParams& params) {
  double s = params.angle_scale * std::sqrt(u);
  double r = s / 3.0;
  return {r * std::cos(s), r * std::sin(s)};
}

SwissRoll swiss_roll(std::size_t n, const SpiralParams& params, Rng& rng) {
  params.validate();
  if (n == 0) throw std::invalid_argument("swiss_roll: need n >= 1");
  SwissRoll out;
  out.points.reserve(n);
  out.latents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // inverse-CDF exponential draw; 1 - uniform() stays in (0, 1]
    double u = -std::log(1.0 - rng.uniform()) / params.latent_rate;
    out.latents.push_back(u);
    out.points.push_back(spiral_point(u, params));
  }
  return out;
}

std::vector<Vec> affine_transform(const std::vector<Vec>& points, double scale,
                                  const Vec& shift) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Vec& p : points) {
    if (p.size() != shift.size())
      throw std::invalid_argument("affine_transform: point/shift dimension mismatch");
    Vec q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = scale * p[i] + shift[i];
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<ImageGrid> shapes_corpus(std::size_t n, std::size_t side, Rng& rng) {
  if (side < 8) throw std::invalid_argument("shapes_corpus: side must be >= 8");
  std::vector<ImageGrid> corpus;
  corpus.reserve(n);
  const std::size_t margin = 2;
  for (std::size_t img = 0; img < n; ++img) {
    ImageGrid grid(side, side, 0.0);
    std::size_t n_shapes = 1 + rng.index(4);
    for (std::size_t s = 0; s < n_shapes; ++s) {
      bool disc = rng.index(2) == 1;
      if (disc) {
        // a disc of radius r occupies [c - r, c + r]; keep it in
        // [margin, side - margin - 1]
        std::size_t max_radius = std::min(side / 4, (side - 2 * margin - 1) / 2);
        std::size_t radius = 1 + rng.index(max_radius);
        std::size_t slack = side - 2 * margin - 2 * radius;
        std::size_t cy = margin + radius + rng.index(slack);
        std::size_t cx = margin + radius + rng.index(slack);
        for (std::size_t r = cy - radius; r <= cy + radius; ++r)
          for (std::size_t c = cx - radius; c <= cx + radius; ++c) {
            double dy = static_cast<double>(r) - static_cast<double>(cy);
            double dx = static_cast<double>(c) - static_cast<double>(cx);
            if (dy * dy + dx * dx <= static_cast<double>(radius * radius)) grid.at(r, c) = 1.0;
          }
      } else {
        std::size_t max_extent = side / 2;
        std::size_t h = 2 + rng.index(max_extent - 1);
        std::size_t w = 2 + rng.index(max_extent - 1);
        std::size_t top = margin + rng.index(side - 2 * margin - h + 1);
        std::size_t left = margin + rng.index(side - 2 * margin - w + 1);
        for (std::size_t r = top; r < top + h; ++r)
          for (std::size_t c = left; c < left + w; ++c) grid.at(r, c) = 1.0;
      }
    }
    corpus.push_back(std::move(grid));
  }
  return corpus;
}

ManifoldDistance manifold_distance(const std::vector<Vec>& points, const SpiralParams& params) {
  params.validate();
  if (points.empty()) throw std::invalid_argument("manifold_distance: no points");

  constexpr std::size_t kGridSize = 10000;
  constexpr double kLatentMax = 8.0;
  std::vector<Vec> grid;
  grid.reserve(kGridSize);
  double bound = 0.0;
  for (std::size_t i = 0; i < kGridSize; ++i) {
    double u = kLatentMax * static_cast<double>(i) / static_cast<double>(kGridSize - 1);
    grid.push_back(spiral_point(u, params));
    if (i > 0) bound = std::max(bound, std::sqrt(squared_distance(grid[i], grid[i - 1])));
  }

  double total = 0.0;
  for (const Vec& p : points) {
    if (p.size() != 2) throw std::invalid_argument("manifold_distance: points must be 2-vectors");
    double best = squared_distance(p, grid.front());
    for (const Vec& g : grid) best = std::min(best, squared_distance(p, g));
    total += std::sqrt(best);
  }
  return ManifoldDistance{total / static_cast<double>(points.size()), bound};
}

void write_points_csv(const std::filesystem::path& path, const std::vector<Vec>& points,
                      const Vec& latents) {
  if (!latents.empty() && latents.size() != points.size())
    throw std::invalid_argument("write_points_csv: latents/points length mismatch");
  CsvWriter csv(path);
  if (latents.empty())
    csv.header({"x", "y"});
  else
    csv.header({"x", "y", "u"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::string> row{format_double(points[i][0]), format_double(points[i][1])};
    if (!latents.empty()) row.push_back(format_double(latents[i]));
    csv.row(row);
  }
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (double v : image.pixels) {
    double clamped = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(clamped * 255.0))));
  }
}

}  // namespace dkgm
