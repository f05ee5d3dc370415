#pragma once

#include <cstdint>
#include <random>

#include "weaklab/linalg.hpp"

namespace weaklab {

/// Seedable RNG with portable uniform/Gaussian output (the standard
/// distributions are implementation-defined, so Box–Muller is done here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box–Muller.
  double gaussian();

  /// Standard complex normal: real and imaginary parts N(0, 1/2).
  Complex gaussian_complex();

  /// Independent stream for parallel/MC sub-tasks.
  Rng derived(std::uint64_t stream) const;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-random pure state from a normalized isotropic complex Gaussian.
PureState haar_random_pure(Eigen::Index dim, Rng& rng);

/// GUE-like Hermitian matrix with unit-scale entries.
Mat random_hermitian(Eigen::Index dim, Rng& rng);

/// General complex matrix with independent standard complex normal entries.
Mat random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace weaklab
