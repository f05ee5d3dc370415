#include "weaklab/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace weaklab {

double max_abs(const Mat& m) {
  if (m.size() == 0) {
    return 0.0;
  }
  return m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& m, double eps) {
  if (m.rows() != m.cols()) {
    return false;
  }
  return max_abs(m - m.adjoint()) <= eps;
}

HermitianParts hermitian_split(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("hermitian_split: matrix must be square");
  }
  const Complex half_i{0.0, 0.5};
  HermitianParts parts;
  parts.real_part = 0.5 * (m + m.adjoint());
  parts.imag_part = -half_i * (m - m.adjoint());  // (M − M†)/(2i)
  return parts;
}

double f_functional(const Mat& b, double eps) {
  if (!is_hermitian(b, eps)) {
    throw NonHermitianInput("f_functional: input is not Hermitian");
  }
  const double d = static_cast<double>(b.rows());
  const double tr = b.trace().real();
  const double tr_sq = (b * b).trace().real();
  return d * tr_sq - tr * tr;
}

double f_bilinear(const Mat& a, const Mat& b, double eps) {
  if (!is_hermitian(a, eps) || !is_hermitian(b, eps)) {
    throw NonHermitianInput("f_bilinear: inputs must be Hermitian");
  }
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("f_bilinear: dimension mismatch");
  }
  const double d = static_cast<double>(a.rows());
  return d * (a * b).trace().real() - a.trace().real() * b.trace().real();
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat partial_trace_aux(const Mat& m, Eigen::Index aux_dim) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("partial_trace_aux: matrix must be square");
  }
  if (aux_dim < 1 || m.rows() % aux_dim != 0) {
    throw DimensionMismatch("partial_trace_aux: dimension does not factor");
  }
  const Eigen::Index sys = m.rows() / aux_dim;
  Mat out = Mat::Zero(sys, sys);
  for (Eigen::Index i = 0; i < sys; ++i) {
    for (Eigen::Index j = 0; j < sys; ++j) {
      Complex acc{0.0, 0.0};
      for (Eigen::Index a = 0; a < aux_dim; ++a) {
        acc += m(i * aux_dim + a, j * aux_dim + a);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Mat matrix_exp(const Mat& h, Complex scale) {
  if (h.rows() != h.cols()) {
    throw DimensionMismatch("matrix_exp: matrix must be square");
  }
  if (is_hermitian(h)) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    const RealVec& eigs = solver.eigenvalues();
    Vec phases(eigs.size());
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
      phases(k) = std::exp(scale * eigs(k));
    }
    return solver.eigenvectors() * phases.asDiagonal() *
           solver.eigenvectors().adjoint();
  }
  Mat scaled = scale * h;
  return scaled.exp();
}

Mat inverse_sqrt(const Mat& s, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(s);
  const RealVec& eigs = solver.eigenvalues();
  if (eigs.minCoeff() <= floor) {
    throw ValidationError("inverse_sqrt: matrix is not positive definite");
  }
  Vec scaled(eigs.size());
  for (Eigen::Index k = 0; k < eigs.size(); ++k) {
    scaled(k) = Complex{1.0 / std::sqrt(eigs(k)), 0.0};
  }
  return solver.eigenvectors() * scaled.asDiagonal() *
         solver.eigenvectors().adjoint();
}

PureState::PureState(Vec amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) {
    throw DimensionMismatch("PureState: dimension must be at least 1");
  }
  const double norm_sq = amplitudes_.squaredNorm();
  if (std::abs(norm_sq - 1.0) > tol::state_norm) {
    throw ValidationError("PureState: amplitudes are not normalized");
  }
}

PureState PureState::normalized(Vec amplitudes) {
  const double norm = amplitudes.norm();
  if (norm <= 0.0) {
    throw ValidationError("PureState: cannot normalize the zero vector");
  }
  amplitudes /= norm;
  return PureState(std::move(amplitudes));
}

}  // namespace weaklab
