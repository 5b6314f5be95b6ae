#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dkgm/tensor.hpp"

namespace dkgm {

/// Deterministic random source. All experiments draw exclusively through
/// this wrapper so that results are bit-reproducible per platform: the
/// engine is mt19937_64 and the normal sampler is a fixed Box-Muller
/// transform rather than the implementation-defined std distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// standard normal via Box-Muller; one spare value is cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vec normal_vec(std::size_t n) {
    Vec v(n);
    for (double& x : v) x = normal();
    return v;
  }

  /// uniform index in [0, n) by 128-bit multiply-shift
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<__uint128_t>(engine_()) * n) >> 64);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream-splitting rule: stream i of master seed s is seeded by the
/// splitmix64 finalizer applied to s + (i + 1) * 0x9E3779B97F4A7C15.
/// The offset is odd, so i -> s + (i+1)*offset is injective mod 2^64 and
/// the finalizer is a bijection; distinct streams therefore get distinct
/// seeds for every master seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(stream_seed(master, stream));
}

}  // namespace dkgm
