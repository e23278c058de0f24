#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace bistab {

/// Deterministic random stream. Uniform and gaussian draws are mapped from
/// raw mt19937_64 output by hand so that results are bit-stable across
/// standard library implementations (std::*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller (uncached; two uniforms per draw).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vec(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Derives an independent child stream. Children of the same parent with
  /// distinct ids never share state.
  Rng fork(std::uint64_t stream_id) const {
    return Rng(mix(seed_ ^ mix(stream_id + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {  // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace bistab
