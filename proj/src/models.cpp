#include "weaklab/models.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace weaklab {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

}  // namespace

Mat qubit_model_hamiltonian(const Mat& a_hat) {
  if (a_hat.rows() != a_hat.cols() || a_hat.rows() < 1) {
    throw DimensionMismatch("qubit_model_hamiltonian: matrix must be square");
  }
  const HermitianParts parts = hermitian_split(a_hat);
  Mat plus_minus = Mat::Zero(2, 2);   // |+⟩⟨−|
  Mat minus_plus = Mat::Zero(2, 2);   // |−⟩⟨+|
  Mat plus_plus = Mat::Zero(2, 2);
  Mat minus_minus = Mat::Zero(2, 2);
  plus_minus(0, 1) = 1.0;
  minus_plus(1, 0) = 1.0;
  plus_plus(0, 0) = 1.0;
  minus_minus(1, 1) = 1.0;

  const Complex i{0.0, 1.0};
  return 0.5 * (i * tensor(parts.real_part, minus_plus) -
                i * tensor(parts.real_part, plus_minus) +
                tensor(parts.imag_part, plus_plus) -
                tensor(parts.imag_part, minus_minus));
}

namespace {

// (𝟙⊗⟨aux_row|)·X·(𝟙⊗(|+⟩+|−⟩)) for a system⊗qubit operator X.
Mat qubit_block(const Mat& x, Eigen::Index d, int aux_row) {
  Mat out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      out(i, j) = x(2 * i + aux_row, 2 * j) + x(2 * i + aux_row, 2 * j + 1);
    }
  }
  return out;
}

}  // namespace

QuantumInstrument build_qubit_model(const Mat& a_hat) {
  const Mat h = qubit_model_hamiltonian(a_hat);
  const Eigen::Index d = a_hat.rows();
  const Mat h_sq = h * h;

  std::vector<InstrumentOutcome> outcomes(2);
  for (int idx = 0; idx < 2; ++idx) {
    const double sign = idx == 0 ? 1.0 : -1.0;
    KrausSeries ks;
    ks.k0 = kInvSqrt2;
    ks.first_order = sign * a_hat / (2.0 * std::sqrt(2.0));
    ks.second_order = -kInvSqrt2 * qubit_block(h_sq, d, idx);
    ks.exact = [h, d, idx](double lambda) {
      const Mat u = matrix_exp(h, Complex{0.0, lambda});
      return Mat(kInvSqrt2 * qubit_block(u, d, idx));
    };
    outcomes[idx].value = sign;
    outcomes[idx].kraus.push_back(std::move(ks));
  }
  return QuantumInstrument(d, InstrumentMode::Exact, std::move(outcomes),
                           /*lambda_max=*/0.5);
}

double chirp_for_xp(double target_xp, double sigma) {
  return -target_xp / (4.0 * sigma * sigma);
}

VonNeumannModel::VonNeumannModel(Mat o_hat, Mat b_hat, MeterSpec meter)
    : o_hat_(std::move(o_hat)), b_hat_(std::move(b_hat)), spec_(meter) {
  if (o_hat_.rows() != o_hat_.cols() || b_hat_.rows() != b_hat_.cols() ||
      o_hat_.rows() != b_hat_.rows()) {
    throw DimensionMismatch("VonNeumannModel: operator dimension mismatch");
  }
  if (!is_hermitian(o_hat_) || !is_hermitian(b_hat_)) {
    throw NonHermitianInput("VonNeumannModel: operators must be Hermitian");
  }
  if (spec_.sigma <= 0.0 || spec_.points < 32) {
    throw GridTooCoarse("VonNeumannModel: bad meter parameters");
  }

  Eigen::SelfAdjointEigenSolver<Mat> o_solver(o_hat_);
  o_eigs_ = o_solver.eigenvalues();
  o_vecs_ = o_solver.eigenvectors();
  Eigen::SelfAdjointEigenSolver<Mat> b_solver(b_hat_);
  b_eigs_ = b_solver.eigenvalues();
  b_vecs_ = b_solver.eigenvectors();

  const double max_shift = o_eigs_.cwiseAbs().maxCoeff();
  half_width_ = spec_.half_width > 0.0
                    ? spec_.half_width
                    : 8.0 * spec_.sigma + 2.0 * max_shift;
  if (half_width_ < 8.0 * spec_.sigma + max_shift) {
    throw GridTooCoarse(
        "VonNeumannModel: grid too narrow for the meter width and shifts");
  }
  const int n = spec_.points;
  dx_ = 2.0 * half_width_ / n;
  if (spec_.sigma / dx_ < 8.0) {
    throw GridTooCoarse("VonNeumannModel: fewer than 8 points per width");
  }

  grid_.resize(n);
  for (int i = 0; i < n; ++i) {
    grid_(i) = -half_width_ + (i + 0.5) * dx_;
  }

  meter_.resize(n);
  const Complex alpha{1.0 / (4.0 * spec_.sigma * spec_.sigma), spec_.chirp};
  for (int i = 0; i < n; ++i) {
    meter_(i) = std::exp(-alpha * grid_(i) * grid_(i));
  }
  meter_ /= meter_.norm() * std::sqrt(dx_);

  // Moments of the initial meter.
  RealVec density = meter_.cwiseAbs2();
  x_mean_ = (grid_.array() * density.array()).sum() * dx_;
  x_var_ = ((grid_.array() - x_mean_).square() * density.array()).sum() * dx_;
  const Vec p_psi = momentum_apply(meter_);
  p_mean_ = (meter_.conjugate().array() * p_psi.array()).sum().real() * dx_;
  p_sq_ = p_psi.squaredNorm() * dx_;
  xp_sym_ = 2.0 *
            (grid_.array() *
             (meter_.conjugate().array() * p_psi.array()).real())
                .sum() *
            dx_;

  const double sig_sq = spec_.sigma * spec_.sigma;
  if (std::abs(x_mean_) > 1e-8 * spec_.sigma ||
      std::abs(x_var_ - sig_sq) > 1e-6 * sig_sq) {
    throw GridTooCoarse("VonNeumannModel: meter moments off the grid");
  }
}

Vec VonNeumannModel::momentum_apply(const Vec& wave) const {
  const int n = static_cast<int>(wave.size());
  Eigen::FFT<double> fft;
  Vec freq(n);
  Vec in = wave;
  fft.fwd(freq, in);
  const double dk = 2.0 * std::numbers::pi / (n * dx_);
  for (int m = 0; m < n; ++m) {
    const double k = dk * (m <= n / 2 ? m : m - n);
    freq(m) *= k;
  }
  Vec out(n);
  fft.inv(out, freq);
  return out;
}

Vec VonNeumannModel::translated_meter(double shift) const {
  const int n = static_cast<int>(meter_.size());
  Eigen::FFT<double> fft;
  Vec freq(n);
  Vec in = meter_;
  fft.fwd(freq, in);
  const double dk = 2.0 * std::numbers::pi / (n * dx_);
  for (int m = 0; m < n; ++m) {
    const double k = dk * (m <= n / 2 ? m : m - n);
    freq(m) *= std::exp(Complex{0.0, -k * shift});
  }
  Vec out(n);
  fft.inv(out, freq);
  return out;
}

void VonNeumannModel::check_edges(const Mat& joint) const {
  // The minimum legal grid (L = 8σ + max shift) leaves amplitude e⁻¹⁶ ≈ 1e-7
  // at the boundary; anything above that signals wrap-around.
  const Eigen::Index n = joint.cols();
  const double peak = joint.cwiseAbs().maxCoeff();
  const double edge = std::max(joint.col(0).cwiseAbs().maxCoeff(),
                               joint.col(n - 1).cwiseAbs().maxCoeff());
  if (edge > 1e-6 * peak) {
    throw GridTooCoarse(
        "VonNeumannModel: translated meter touches the grid boundary");
  }
}

Mat VonNeumannModel::joint_evolve(const PureState& system) const {
  if (system.dim() != dim()) {
    throw DimensionMismatch("VonNeumannModel: system dimension mismatch");
  }
  const Eigen::Index d = dim();
  const int n = spec_.points;

  // e^{−iÔP̂}: translate per eigenvalue of Ô.
  const Vec coeffs = o_vecs_.adjoint() * system.amplitudes();
  Mat joint(d, n);
  for (Eigen::Index j = 0; j < d; ++j) {
    joint.row(j) = coeffs(j) * translated_meter(o_eigs_(j)).transpose();
  }
  joint = o_vecs_ * joint;

  // e^{i(σ^{−2}/2)B̂X̂}: X̂-diagonal phase per eigenvector of B̂.
  if (max_abs(b_hat_) > 0.0) {
    joint = b_vecs_.adjoint() * joint;
    const double scale = 0.5 / (spec_.sigma * spec_.sigma);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (int i = 0; i < n; ++i) {
        joint(j, i) *= std::exp(Complex{0.0, scale * b_eigs_(j) * grid_(i)});
      }
    }
    joint = b_vecs_ * joint;
  }

  check_edges(joint);
  return joint;
}

namespace {

struct StateDecomposition {
  std::vector<double> weights;
  std::vector<PureState> states;
};

StateDecomposition decompose(const DensityState& s) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(s.matrix());
  StateDecomposition out;
  for (Eigen::Index r = 0; r < s.dim(); ++r) {
    const double w = solver.eigenvalues()(r);
    if (w > 1e-14) {
      out.weights.push_back(w);
      out.states.push_back(PureState::normalized(solver.eigenvectors().col(r)));
    }
  }
  return out;
}

}  // namespace

double VonNeumannModel::unconditioned_meter_mean(const DensityState& s) const {
  const StateDecomposition dec = decompose(s);
  double mean = 0.0;
  for (std::size_t r = 0; r < dec.weights.size(); ++r) {
    const Mat joint = joint_evolve(dec.states[r]);
    for (int i = 0; i < spec_.points; ++i) {
      mean += dec.weights[r] * grid_(i) * joint.col(i).squaredNorm() * dx_;
    }
  }
  return mean;
}

double VonNeumannModel::conditioned_meter_mean(const DensityState& s,
                                               const Effect& effect) const {
  if (effect.dim() != dim()) {
    throw DimensionMismatch("VonNeumannModel: effect dimension mismatch");
  }
  const StateDecomposition dec = decompose(s);
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t r = 0; r < dec.weights.size(); ++r) {
    const Mat joint = joint_evolve(dec.states[r]);
    for (int i = 0; i < spec_.points; ++i) {
      const double weight =
          (joint.col(i).adjoint() * effect.matrix() * joint.col(i))(0, 0)
              .real() *
          dx_ * dec.weights[r];
      numerator += grid_(i) * weight;
      denominator += weight;
    }
  }
  if (denominator <= tol::overlap_floor) {
    throw ZeroOverlap("VonNeumannModel: postselection never succeeds");
  }
  return numerator / denominator;
}

GeneralizedObservable VonNeumannModel::observable() const {
  const Complex i{0.0, 1.0};
  return GeneralizedObservable(o_hat_ + i * (b_hat_ - xp_sym_ * o_hat_));
}

VonNeumannModel::MeterDistribution VonNeumannModel::meter_distribution(
    const DensityState& s, const Effect& effect) const {
  const double overlap = (effect.matrix() * s.matrix()).trace().real();
  if (overlap <= tol::overlap_floor) {
    throw ZeroOverlap("VonNeumannModel: tr[effect·state] vanishes");
  }
  MeterDistribution dist;
  dist.x = grid_;
  dist.initial = meter_.cwiseAbs2();
  dist.weak_value_o = (effect.matrix() * o_hat_ * s.matrix()).trace() / overlap;
  dist.weak_value_b = (effect.matrix() * b_hat_ * s.matrix()).trace() / overlap;

  const StateDecomposition dec = decompose(s);
  RealVec unnormalized = RealVec::Zero(spec_.points);
  for (std::size_t r = 0; r < dec.weights.size(); ++r) {
    const Mat joint = joint_evolve(dec.states[r]);
    for (int i = 0; i < spec_.points; ++i) {
      unnormalized(i) +=
          dec.weights[r] *
          (joint.col(i).adjoint() * effect.matrix() * joint.col(i))(0, 0)
              .real();
    }
  }
  const double total = unnormalized.sum() * dx_;
  dist.postselected = unnormalized / total;

  // Four leading terms: translation, imaginary-part deformation, B̂ kick.
  const Vec p_psi = momentum_apply(meter_);
  RealVec derivative(spec_.points);   // ∂_x P_i = −2 Im[ψ* (P̂ψ)]
  RealVec anticomm(spec_.points);     // ⟨{Π̂_x, P̂}⟩ = 2 Re[ψ* (P̂ψ)]
  for (int i = 0; i < spec_.points; ++i) {
    const Complex cross = std::conj(meter_(i)) * p_psi(i);
    derivative(i) = -2.0 * cross.imag();
    anticomm(i) = 2.0 * cross.real();
  }
  const double inv_sig_sq = 1.0 / (spec_.sigma * spec_.sigma);
  dist.predicted =
      dist.initial - dist.weak_value_o.real() * derivative +
      dist.weak_value_o.imag() * anticomm -
      dist.weak_value_b.imag() * inv_sig_sq *
          (grid_.array() * dist.initial.array()).matrix();
  dist.residual = dist.postselected - dist.predicted;
  return dist;
}

DensityState VonNeumannModel::system_after_ignore(const DensityState& s) const {
  const StateDecomposition dec = decompose(s);
  Mat out = Mat::Zero(dim(), dim());
  for (std::size_t r = 0; r < dec.weights.size(); ++r) {
    const Mat joint = joint_evolve(dec.states[r]);
    out += dec.weights[r] * (joint * joint.adjoint()) * dx_;
  }
  return DensityState(std::move(out));
}

double VonNeumannModel::haar_mean_survival() const {
  const Eigen::Index d = dim();
  // Grid Kraus family K_x = ⟨x|Û^σ|meter⟩; the Haar average of the survival
  // probability needs only tr[K†K] (= d in total) and Σ_x |tr K_x|².
  std::vector<Mat> columns;
  columns.reserve(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    Vec basis = Vec::Zero(d);
    basis(b) = 1.0;
    columns.push_back(joint_evolve(PureState(basis)));
  }
  double trace_term = 0.0;
  for (int i = 0; i < spec_.points; ++i) {
    Complex tr{0.0, 0.0};
    for (Eigen::Index b = 0; b < d; ++b) {
      tr += columns[b](b, i);
    }
    trace_term += std::norm(tr) * dx_;
  }
  const double dd = static_cast<double>(d);
  return (dd + trace_term) / (dd * (dd + 1.0));
}

double VonNeumannModel::script_f() const {
  const double sig_sq = spec_.sigma * spec_.sigma;
  return sig_sq * p_sq_ * f_functional(o_hat_) +
         0.25 * f_functional(b_hat_) -
         0.5 * xp_sym_ * f_bilinear(o_hat_, b_hat_);
}

double general_bilinear_weak_value(const NullWeakModel& model,
                                   const DensityState& s,
                                   const Effect& effect) {
  if (model.terms.empty()) {
    throw ValidationError("general_bilinear_weak_value: no terms");
  }
  const double overlap = (effect.matrix() * s.matrix()).trace().real();
  if (overlap <= tol::overlap_floor) {
    throw ZeroPostselectionProbability(
        "general_bilinear_weak_value: tr[effect·state] vanishes");
  }
  double numerator = 0.0;
  for (const BilinearTerm& term : model.terms) {
    numerator += term.sign * (effect.matrix() * term.op * s.matrix() *
                              term.op.adjoint())
                                 .trace()
                                 .real();
  }
  return numerator / overlap;
}

NullWeakModel polarization_split(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch("polarization_split: dimension mismatch");
  }
  NullWeakModel model;
  model.terms.push_back({0.5 * (a + b.adjoint()), +1});
  model.terms.push_back({0.5 * (a - b.adjoint()), -1});
  return model;
}

NullWeakModel null_weak_model(const Mat& o_hermitian) {
  if (!is_hermitian(o_hermitian)) {
    throw NonHermitianInput("null_weak_model: operator must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(o_hermitian);
  const Eigen::Index d = o_hermitian.rows();
  NullWeakModel model;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double eig = solver.eigenvalues()(k);
    if (std::abs(eig) <= 1e-14) {
      continue;
    }
    const double root = std::sqrt(std::abs(eig));
    for (Eigen::Index l = 0; l < d; ++l) {
      // √|o_k| |e_l⟩⟨o_k|
      Mat term = Mat::Zero(d, d);
      for (Eigen::Index c = 0; c < d; ++c) {
        term(l, c) = root * std::conj(solver.eigenvectors()(c, k));
      }
      model.terms.push_back({std::move(term), eig > 0.0 ? +1 : -1});
    }
  }
  if (model.terms.empty()) {
    // Ô = 0: a single zero term keeps the model well-formed.
    model.terms.push_back({Mat::Zero(d, d), +1});
  }
  return model;
}

QuantumInstrument classical_embedding_instrument(const RealMat& a_tilde) {
  if (a_tilde.rows() != a_tilde.cols()) {
    throw DimensionMismatch(
        "classical_embedding_instrument: matrix must be square");
  }
  const Eigen::Index n = a_tilde.rows();
  std::vector<InstrumentOutcome> outcomes(2);
  outcomes[0].value = 1.0;
  outcomes[1].value = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double entry = a_tilde(k, j);
      if (entry == 0.0) {
        continue;
      }
      KrausSeries ks;
      ks.k0 = 0.0;
      ks.first_order = Mat::Zero(n, n);
      ks.first_order(k, j) = std::sqrt(std::abs(entry));
      outcomes[entry > 0.0 ? 0 : 1].kraus.push_back(std::move(ks));
    }
  }
  for (auto& out : outcomes) {
    if (out.kraus.empty()) {
      KrausSeries ks;
      ks.k0 = 0.0;
      ks.first_order = Mat::Zero(n, n);
      out.kraus.push_back(std::move(ks));
    }
  }
  return QuantumInstrument(n, InstrumentMode::SqrtLambda, std::move(outcomes));
}

double classical_embedding_weak_value(const RealMat& a_tilde,
                                      const OnticDistribution& p,
                                      const PostselectionWeights& q) {
  if (a_tilde.rows() != p.size() || q.size() != p.size()) {
    throw DimensionMismatch("classical_embedding_weak_value: size mismatch");
  }
  const QuantumInstrument inst = classical_embedding_instrument(a_tilde);
  const Eigen::Index n = a_tilde.rows();
  Mat s = Mat::Zero(n, n);
  Mat effect = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    s(j, j) = p[static_cast<int>(j)];
    effect(j, j) = q[static_cast<int>(j)];
  }
  const double overlap = (effect * s).trace().real();
  if (overlap <= tol::overlap_floor) {
    throw ZeroPostselectionProbability(
        "classical_embedding_weak_value: q·p vanishes");
  }
  double numerator = 0.0;
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    for (const KrausSeries& ks : inst.outcomes()[m].kraus) {
      numerator += inst.contextual_value(m) *
                   (effect * ks.first_order * s * ks.first_order.adjoint())
                       .trace()
                       .real();
    }
  }
  return numerator / overlap;
}

}  // namespace weaklab
