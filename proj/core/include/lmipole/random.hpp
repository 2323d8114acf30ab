#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "lmipole/numerics.hpp"

namespace lmipole {

/// Seeded generator with distribution mappings written out explicitly, so a
/// given seed yields the same stream on every standard library.
class Rng {
 public:
  static constexpr std::string_view kGeneratorName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (one draw per call, no caching).
  double normal();

  /// Vector of i.i.d. uniform entries on [lo, hi].
  Vector uniform_vector(Eigen::Index size, double lo, double hi);

  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

  /// Uniform sample from the Euclidean ball of the given radius in R^dim:
  /// Gaussian direction, radius scaled by rho^(1/dim).
  Vector uniform_in_ball(Eigen::Index dim, double radius);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lmipole
