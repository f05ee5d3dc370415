#include "weaklab/random.hpp"

#include <cmath>
#include <numbers>

namespace weaklab {

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Complex Rng::gaussian_complex() {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  const double re = gaussian();
  const double im = gaussian();
  return Complex{re * inv_sqrt2, im * inv_sqrt2};
}

Rng Rng::derived(std::uint64_t stream) const {
  Rng copy = *this;
  // Decorrelate with a splitmix64 step of the stream index.
  std::uint64_t z = stream + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  std::uint64_t base = copy.engine_();
  return Rng(base ^ z);
}

PureState haar_random_pure(Eigen::Index dim, Rng& rng) {
  Vec amplitudes(dim);
  do {
    for (Eigen::Index j = 0; j < dim; ++j) {
      amplitudes(j) = rng.gaussian_complex();
    }
  } while (amplitudes.norm() <= 1e-12);
  return PureState::normalized(std::move(amplitudes));
}

Mat random_hermitian(Eigen::Index dim, Rng& rng) {
  Mat raw = random_complex(dim, dim, rng);
  return 0.5 * (raw + raw.adjoint());
}

Mat random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = rng.gaussian_complex();
    }
  }
  return out;
}

}  // namespace weaklab
