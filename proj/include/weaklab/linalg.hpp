#pragma once

#include <Eigen/Dense>
#include <complex>

#include "weaklab/errors.hpp"

namespace weaklab {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double state_norm = 1e-12;
inline constexpr double completeness = 1e-8;
inline constexpr double unitarity = 1e-10;
inline constexpr double overlap_floor = 1e-12;
}  // namespace tol

/// Largest absolute entry, ‖M‖_max.
double max_abs(const Mat& m);

bool is_hermitian(const Mat& m, double eps = tol::hermitian);

/// Decomposition M = R + iI with R, I Hermitian.
struct HermitianParts {
  Mat real_part;  // (M + M†)/2
  Mat imag_part;  // (M − M†)/(2i)
};
HermitianParts hermitian_split(const Mat& m);

/// d·tr[B²] − (tr B)² for Hermitian B. Non-negative; zero iff B ∝ 𝟙.
/// Throws NonHermitianInput.
double f_functional(const Mat& b, double eps = tol::hermitian);

/// Associated bilinear form d·tr[AB] − tr[A]·tr[B] for Hermitian A, B.
double f_bilinear(const Mat& a, const Mat& b, double eps = tol::hermitian);

/// Kronecker product, first factor slow index.
Mat tensor(const Mat& a, const Mat& b);

/// Trace over the auxiliary (fast) factor of a dim·aux_dim operator.
/// Throws DimensionMismatch when dimensions do not factor.
Mat partial_trace_aux(const Mat& m, Eigen::Index aux_dim);

/// exp(scale·H). Eigendecomposition when H is Hermitian, Padé otherwise.
Mat matrix_exp(const Mat& h, Complex scale = Complex{1.0, 0.0});

/// Hermitian inverse square root; throws ValidationError unless S ≻ floor.
Mat inverse_sqrt(const Mat& s, double floor = 1e-12);

/// Normalized state vector on a d-dimensional Hilbert space.
class PureState {
 public:
  explicit PureState(Vec amplitudes);
  static PureState normalized(Vec amplitudes);

  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vec& amplitudes() const { return amplitudes_; }
  Mat projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  Vec amplitudes_;
};

}  // namespace weaklab
