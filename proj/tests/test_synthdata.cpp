#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>

#include "dkgm/rng.hpp"
#include "dkgm/synthdata.hpp"

using namespace dkgm;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("spiral at the latent origin collapses to the origin") {
  SpiralParams params;
  Vec p = spiral_point(0.0, params);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.0);
}

TEST_CASE("spiral point at u = 9/16 hits the negative x axis") {
  // angle_scale * sqrt(9/16) = (4 pi / 3) * (3/4) = pi
  SpiralParams params;
  Vec p = spiral_point(9.0 / 16.0, params);
  CHECK(p[0] == doctest::Approx(-kPi / 3.0).epsilon(1e-12));
  CHECK(std::abs(p[1]) < 1e-12);
  CHECK(p[0] == doctest::Approx(-1.04720).epsilon(1e-5));
}

TEST_CASE("latent draws have the Exp(1) mean") {
  SpiralParams params;
  Rng rng(7);
  SwissRoll roll = swiss_roll(100000, params, rng);
  double sum = 0.0;
  for (double u : roll.latents) sum += u;
  CHECK(sum / 100000.0 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(roll.points.size() == roll.latents.size());
}

TEST_CASE("spiral radius is the closed form and strictly increasing") {
  SpiralParams params;
  double prev = -1.0;
  for (int i = 1; i <= 50; ++i) {
    double u = 8.0 * i / 50.0;
    Vec p = spiral_point(u, params);
    double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
    CHECK(r == doctest::Approx(params.angle_scale * std::sqrt(u) / 3.0).epsilon(1e-12));
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("affine transform examples") {
  std::vector<Vec> pts{{0.0, 0.0}};
  std::vector<Vec> out = affine_transform(pts, 0.1, {1.0, 1.0});
  CHECK(out[0][0] == 1.0);
  CHECK(out[0][1] == 1.0);

  std::vector<Vec> spiral_pt{{-kPi / 3.0, 0.0}};
  out = affine_transform(spiral_pt, 0.1, {1.0, 1.0});
  CHECK(out[0][0] == doctest::Approx(1.0 - 0.1 * kPi / 3.0).epsilon(1e-12));
  CHECK(out[0][0] == doctest::Approx(0.89528).epsilon(1e-5));
  CHECK(out[0][1] == 1.0);

  std::vector<Vec> id = affine_transform(spiral_pt, 1.0, {0.0, 0.0});
  CHECK(id[0] == spiral_pt[0]);
}

TEST_CASE("affine transform inverts to 1e-12") {
  SpiralParams params;
  Rng rng(11);
  SwissRoll roll = swiss_roll(200, params, rng);
  std::vector<Vec> fwd = affine_transform(roll.points, 0.1, {1.0, 1.0});
  std::vector<Vec> back = affine_transform(fwd, 10.0, {-10.0, -10.0});
  for (std::size_t i = 0; i < roll.points.size(); ++i) {
    CHECK(std::abs(back[i][0] - roll.points[i][0]) < 1e-12);
    CHECK(std::abs(back[i][1] - roll.points[i][1]) < 1e-12);
  }
}

TEST_CASE("shapes corpus is binary, deterministic, and nonempty") {
  Rng a(13), b(13);
  std::vector<ImageGrid> corpus_a = shapes_corpus(32, 16, a);
  std::vector<ImageGrid> corpus_b = shapes_corpus(32, 16, b);
  REQUIRE(corpus_a.size() == 32);
  for (std::size_t i = 0; i < corpus_a.size(); ++i) {
    CHECK(corpus_a[i].pixels == corpus_b[i].pixels);
    bool has_foreground = false;
    for (double v : corpus_a[i].pixels) {
      CHECK((v == 0.0 || v == 1.0));
      has_foreground = has_foreground || v == 1.0;
    }
    CHECK(has_foreground);
  }
  CHECK_THROWS_AS(shapes_corpus(4, 7, a), std::invalid_argument);
}

TEST_CASE("shapes keep a two-pixel clear border") {
  Rng rng(17);
  std::vector<ImageGrid> corpus = shapes_corpus(64, 16, rng);
  for (const ImageGrid& im : corpus) {
    for (std::size_t i = 0; i < 16; ++i) {
      for (std::size_t m = 0; m < 2; ++m) {
        CHECK(im.at(m, i) == 0.0);
        CHECK(im.at(15 - m, i) == 0.0);
        CHECK(im.at(i, m) == 0.0);
        CHECK(im.at(i, 15 - m) == 0.0);
      }
    }
  }
}

TEST_CASE("points on the spiral are within the grid resolution bound") {
  SpiralParams params;
  Rng rng(19);
  SwissRoll roll = swiss_roll(500, params, rng);
  std::vector<Vec> on_spiral;
  for (std::size_t i = 0; i < roll.points.size(); ++i)
    if (roll.latents[i] <= 8.0) on_spiral.push_back(roll.points[i]);
  REQUIRE(on_spiral.size() > 400);
  ManifoldDistance d = manifold_distance(on_spiral, params);
  CHECK(d.mean < d.resolution_bound);
  CHECK(d.resolution_bound < 0.1);
}

TEST_CASE("distance from the origin is zero because u = 0 is on the grid") {
  SpiralParams params;
  std::vector<Vec> origin{{0.0, 0.0}, {0.0, 0.0}};
  ManifoldDistance d = manifold_distance(origin, params);
  CHECK(d.mean == 0.0);
}

TEST_CASE("translating points away from the spiral increases the distance") {
  SpiralParams params;
  Rng rng(23);
  SwissRoll roll = swiss_roll(100, params, rng);
  ManifoldDistance close = manifold_distance(roll.points, params);
  std::vector<Vec> moved = affine_transform(roll.points, 1.0, {10.0, 10.0});
  ManifoldDistance far = manifold_distance(moved, params);
  CHECK(far.mean > close.mean);
  CHECK(far.mean > 5.0);
}

TEST_CASE("PGM export is the documented binary format") {
  ImageGrid im(2, 3);
  im.at(0, 0) = 0.0;
  im.at(0, 1) = 1.0;
  im.at(0, 2) = 0.5;
  im.at(1, 0) = 0.25;
  im.at(1, 1) = 2.0;   // clamps to 255
  im.at(1, 2) = -1.0;  // clamps to 0
  auto path = std::filesystem::temp_directory_path() / "dkgm_pgm_test.pgm";
  write_pgm(path, im);
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(content.size() == 11 + 6);
  CHECK(content.substr(0, 11) == "P5\n3 2\n255\n");
  const unsigned char* px = reinterpret_cast<const unsigned char*>(content.data() + 11);
  CHECK(px[0] == 0);
  CHECK(px[1] == 255);
  CHECK(px[2] == 128);  // round(0.5 * 255)
  CHECK(px[3] == 64);   // round(0.25 * 255)
  CHECK(px[4] == 255);
  CHECK(px[5] == 0);
  std::filesystem::remove(path);
}

TEST_CASE("point CSV export carries x, y and optional latent columns") {
  auto path = std::filesystem::temp_directory_path() / "dkgm_points_test.csv";
  write_points_csv(path, {{1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.25});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,u");
  std::getline(in, line);
  CHECK(line == "1,2,0.5");
  std::filesystem::remove(path);
}
