#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace odcmd {

// Deterministic, splittable PRNG built on SplitMix64. All simulation
// randomness goes through this class instead of <random> distributions,
// whose output is implementation-defined; run reproducibility (including
// byte-identical CSV output) depends on the draws being portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // One SplitMix64 output step applied to x, used to stir seed material.
  static std::uint64_t stir(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; two uniforms per call, no cached state.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0,1], keeps the log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(int d) {
    Eigen::VectorXd v(d);
    for (int s = 0; s < d; ++s) v[s] = normal();
    return v;
  }

  // Uniform draw from the unit sphere: normalized Gaussian vector.
  // A zero draw has probability zero but would divide by zero, so retry.
  Eigen::VectorXd unit_sphere(int d) {
    for (;;) {
      Eigen::VectorXd v = normal_vector(d);
      double n = v.norm();
      if (n > 1e-300) return v / n;
    }
  }

 private:
  std::uint64_t state_;
};

// Named substream tags. Changing m, T or the consumer order of one stream
// must not reshuffle draws of another, so every (tag, i, t) triple gets an
// independent generator derived from the master seed.
enum : std::uint64_t {
  kStreamFeatures = 1,
  kStreamNoise = 2,
  kStreamSphere = 3,
  kStreamGraph = 4,
  kStreamEdgeSplit = 5,
};

inline Rng substream(std::uint64_t master, std::uint64_t tag,
                     std::uint64_t i = 0, std::uint64_t t = 0) {
  std::uint64_t k = Rng::stir(master);
  k = Rng::stir(k ^ tag);
  k = Rng::stir(k ^ i);
  k = Rng::stir(k ^ t);
  return Rng(k);
}

}  // namespace odcmd
